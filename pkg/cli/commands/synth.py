"""
Subcomando synth: genera un dataset sintético multivista en disco
"""
import argparse

from cli.commands.common import output_dir, parse_int_list
from models.entities import MatrixFormat
from services.data_service import DataService, make_synthetic


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("synth", parents=[parent], help="Genera un dataset sintético")
    parser.add_argument("--n", type=int, required=True, help="Número de muestras")
    parser.add_argument("--clusters", type=int, required=True, help="Número de grupos reales")
    parser.add_argument("--dims", type=str, required=True, help="Dimensiones por vista, ej. 20,30")
    parser.add_argument("--sigma", type=float, default=0.05, help="Desviación del ruido")
    parser.add_argument("--format", choices=[f.value for f in MatrixFormat], default=MatrixFormat.CSV.value)
    parser.set_defaults(handler=cmd_synth)


def cmd_synth(args: argparse.Namespace) -> int:
    """Escribe view_i.*, labels.csv y manifest.json"""
    dataset = make_synthetic(
        n=args.n,
        k_true=args.clusters,
        view_dims=parse_int_list(args.dims, "--dims"),
        noise_sigma=args.sigma,
        seed=args.seed or 0,
    )
    manifest = DataService().save_dataset(dataset, output_dir(args, "synth"), MatrixFormat(args.format))
    print(manifest)
    return 0

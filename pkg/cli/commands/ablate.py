"""
Subcomando ablate: tabla comparativa de las variantes de ablación
"""
import argparse

from cli.commands.common import add_training_flags, output_dir
from cli.commands.train import resolve_config
from config import settings
from repositories.report_repository import CsvReportRepository
from services.ablation_service import AblationService
from services.data_service import DataService

ABLATION_COLUMNS = ["variant", "acc", "nmi", "ari", "acc_std", "final_loss"]


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("ablate", parents=[parent], help="Estudio de ablación")
    add_training_flags(parser)
    parser.add_argument("--seeds", type=int, default=None, help="Número de semillas por variante")
    parser.add_argument("--clusters", type=int, default=None)
    parser.set_defaults(handler=cmd_ablate)


def cmd_ablate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    dataset = DataService().load_dataset(args.data)
    seeds = [config.seed + offset for offset in range(args.seeds or settings.eval_seeds)]

    rows = AblationService().run(dataset, config, seeds, k_true=args.clusters)

    directory = output_dir(args, "ablate")
    CsvReportRepository().save([row.csv_row() for row in rows], directory / "ablation.csv",
                               fieldnames=ABLATION_COLUMNS)
    for row in rows:
        print(f"{row.variant}: acc={row.acc:.4f} nmi={row.nmi:.4f} ari={row.ari:.4f}")
    return 0

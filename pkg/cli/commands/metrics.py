"""
Subcomando metrics: ACC, NMI y ARI entre dos archivos de etiquetas
"""
import argparse

from models.entities import NmiAverage
from repositories.matrix_repository import LabelRepository
from services.evaluation_service import accuracy, ari, nmi


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("metrics", parents=[parent], help="Métricas entre dos etiquetados")
    parser.add_argument("--pred", required=True)
    parser.add_argument("--truth", required=True)
    parser.add_argument("--nmi-average", choices=[a.value for a in NmiAverage], default=NmiAverage.GEOMETRIC.value)
    parser.set_defaults(handler=cmd_metrics)


def cmd_metrics(args: argparse.Namespace) -> int:
    labels = LabelRepository()
    pred = labels.load(args.pred)
    truth = labels.load(args.truth)
    print(
        f"acc={accuracy(pred, truth):.6f} "
        f"nmi={nmi(pred, truth, NmiAverage(args.nmi_average)):.6f} "
        f"ari={ari(pred, truth):.6f}"
    )
    return 0

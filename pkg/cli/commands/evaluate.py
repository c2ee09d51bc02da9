"""
Subcomando eval: evaluación multi-semilla de un checkpoint
"""
import argparse
from typing import List

from cli.commands.common import output_dir
from config import settings
from models.entities import MultiviewDataset, NmiAverage
from models.schemas import ClusteringReport, EvaluationSummary
from patterns.factory import PresetFactory
from repositories.checkpoint_repository import load_checkpoint
from repositories.report_repository import CsvReportRepository, JsonReportRepository
from services.data_service import DataService
from services.evaluation_service import HCN_MODE, RAW_MODE, EvaluationService
from utils.timezone import format_timestamp


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("eval", parents=[parent], help="Evalúa un checkpoint con k-means")
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--data", required=True)
    parser.add_argument("--seeds", type=int, default=None, help="Número de semillas")
    parser.add_argument("--restarts", type=int, default=None, help="Reinicios de k-means")
    parser.add_argument("--clusters", type=int, default=None, help="k a usar en k-means")
    parser.add_argument("--raw-baseline", action="store_true", help="Evalúa también las entradas crudas")
    parser.add_argument("--nmi-average", choices=[a.value for a in NmiAverage], default=NmiAverage.GEOMETRIC.value)
    parser.set_defaults(handler=cmd_eval)


def resolve_k(dataset: MultiviewDataset, clusters: int | None) -> int | None:
    """--clusters, luego el catálogo, luego las etiquetas"""
    if clusters:
        return clusters
    entry = PresetFactory.find_catalog(dataset.name)
    return entry.k if entry is not None else dataset.k_true


def cmd_eval(args: argparse.Namespace) -> int:
    dataset = DataService().load_dataset(args.data)
    model = load_checkpoint(args.checkpoint, expected_view_dims=dataset.view_dims)
    service = EvaluationService(args.restarts, NmiAverage(args.nmi_average))
    base_seed = args.seed or 0
    seeds = [base_seed + offset for offset in range(args.seeds or settings.eval_seeds)]
    k = resolve_k(dataset, args.clusters)

    reports: List[ClusteringReport] = []
    summaries: List[EvaluationSummary] = []
    modes = [(HCN_MODE, model)] + ([(RAW_MODE, None)] if args.raw_baseline else [])
    for mode, evaluated in modes:
        mode_reports, summary = service.evaluate_seeds(evaluated, dataset, seeds, k, mode)
        reports.extend(mode_reports)
        summaries.append(summary)

    directory = output_dir(args, "eval")
    csv_reports = CsvReportRepository()
    csv_reports.save([report.csv_row() for report in reports], directory / "eval.csv")
    csv_reports.save([summary.csv_row() for summary in summaries], directory / "eval_summary.csv")
    JsonReportRepository().save({
        "generated_at": format_timestamp(),
        "checkpoint": str(args.checkpoint),
        "k": k,
        "summaries": summaries,
        "reports": reports,
    }, directory / "report.json")

    for summary in summaries:
        print(
            f"{summary.mode}: acc={summary.acc.mean:.4f}±{summary.acc.std:.4f} "
            f"nmi={summary.nmi.mean:.4f}±{summary.nmi.std:.4f} "
            f"ari={summary.ari.mean:.4f}±{summary.ari.std:.4f}"
        )
    return 0

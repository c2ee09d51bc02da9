"""
Subcomando train: entrena HCN y escribe checkpoint, historial y configuración
"""
import argparse
from pathlib import Path

from cli.commands.common import add_training_flags, output_dir, training_overrides
from models.entities import TrainingConfig
from models.schemas import TrainingHistory
from patterns.builder import TrainingConfigBuilder
from repositories.report_repository import CsvReportRepository, JsonReportRepository
from services.data_service import DataService
from services.training_service import TrainingService

HISTORY_COLUMNS = ["epoch", "step", "rec", "cls", "code", "glb", "total"]
EPOCH_COLUMNS = ["epoch", "mean_total", "seconds", "acc", "nmi", "ari"]


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("train", parents=[parent], help="Entrena el modelo")
    add_training_flags(parser)
    parser.set_defaults(handler=cmd_train)


def resolve_config(args: argparse.Namespace) -> TrainingConfig:
    """Valores por defecto < preset < archivo < flags"""
    return (
        TrainingConfigBuilder()
        .with_preset(args.preset)
        .with_file(args.config)
        .with_overrides(training_overrides(args))
        .build()
    )


def write_history(history: TrainingHistory, directory: Path) -> None:
    csv_reports = CsvReportRepository()
    csv_reports.save([step.csv_row() for step in history.steps], directory / "history.csv",
                     fieldnames=HISTORY_COLUMNS)
    csv_reports.save([epoch.model_dump() for epoch in history.epochs], directory / "epochs.csv",
                     fieldnames=EPOCH_COLUMNS)


def cmd_train(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    dataset = DataService().load_dataset(args.data)
    directory = output_dir(args, "train")

    JsonReportRepository().save(config, directory / "config.json")
    _, history = TrainingService().train(dataset, config, directory / "checkpoint.hcn")
    write_history(history, directory)

    last = history.epochs[-1]
    print(f"epochs={len(history.epochs)} steps={len(history.steps)} final_mean_total={last.mean_total:.6g}")
    return 0

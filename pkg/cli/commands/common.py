"""
Flags compartidos por los subcomandos
"""
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import settings
from models.entities import Activation, CodingMode, LossReduction
from utils.exceptions import HcnValidationError


def common_parent() -> argparse.ArgumentParser:
    """--seed, --threads, --out y --log-level"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="Semilla raíz")
    parent.add_argument("--threads", type=int, default=None, help="Hilos de BLAS/OpenMP")
    parent.add_argument("--out", type=str, default=None, help="Directorio de salida")
    parent.add_argument("--log-level", type=str, default=None, help="Nivel de log")
    return parent


def parse_int_list(text: Optional[str], flag: str) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        values = [int(token) for token in text.split(",") if token.strip()]
    except ValueError as e:
        raise HcnValidationError(f"{flag}: se esperaba una lista de enteros separada por comas") from e
    if not values:
        raise HcnValidationError(f"{flag}: lista vacía")
    return values


def output_dir(args: argparse.Namespace, default: str) -> Path:
    directory = Path(args.out) if args.out else Path(settings.output_dir) / default
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def add_training_flags(parser: argparse.ArgumentParser) -> None:
    """Flags que sobrescriben campos de TrainingConfig"""
    parser.add_argument("--data", required=True, help="Manifiesto del dataset (JSON o TOML)")
    parser.add_argument("--preset", default=None, help="Preset de hiperparámetros")
    parser.add_argument("--config", default=None, help="Archivo de configuración TOML o JSON")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--rho", type=float, default=None)
    parser.add_argument("--d-out", type=int, default=None)
    parser.add_argument("--hidden", type=str, default=None, help="Anchos ocultos, ej. 128,128,128")
    parser.add_argument("--activation", choices=[a.value for a in Activation], default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--lambda1", type=float, default=None)
    parser.add_argument("--lambda2", type=float, default=None)
    parser.add_argument("--coding-mode", choices=[m.value for m in CodingMode], default=None)
    parser.add_argument("--loss-reduction", choices=[r.value for r in LossReduction], default=None)
    parser.add_argument("--raw-global", action="store_const", const=False, default=None,
                        dest="normalize_global", help="Traza sin normalizar en L_Glb")
    parser.add_argument("--no-augmentation", action="store_const", const=False, default=None,
                        dest="use_augmentation")
    parser.add_argument("--disable", type=str, default=None, help="Términos deshabilitados, ej. cls,glb")
    parser.add_argument("--eval-every", type=int, default=None)
    parser.add_argument("--restarts", type=int, default=None, help="Reinicios de k-means")


def training_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Diccionario de sobrescrituras; los flags ausentes quedan en None"""
    disabled = None
    if args.disable:
        disabled = [token.strip() for token in args.disable.split(",") if token.strip()]
    return {
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "lr": args.lr,
        "rho": args.rho,
        "d_out": args.d_out,
        "hidden_widths": parse_int_list(args.hidden, "--hidden"),
        "activation": args.activation,
        "seed": args.seed,
        "coding_mode": args.coding_mode,
        "loss_reduction": args.loss_reduction,
        "normalize_global": args.normalize_global,
        "use_augmentation": args.use_augmentation,
        "disabled_terms": disabled,
        "eval_every": args.eval_every,
        "kmeans_restarts": args.restarts,
        "weights": {
            "alpha": args.alpha,
            "beta": args.beta,
            "gamma": args.gamma,
            "lambda1": args.lambda1,
            "lambda2": args.lambda2,
        },
    }

"""
Subcomando gradcheck: verificación de gradientes por término
"""
import argparse

from models.entities import Activation, CodingMode
from services.gradcheck_service import TERMS, GradCheckService
from utils.exceptions import GradientCheckError


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("gradcheck", parents=[parent], help="Chequeo de gradientes")
    parser.add_argument("--term", choices=[*TERMS, "all"], default="all")
    parser.add_argument("--views", type=int, default=2)
    parser.add_argument("--tolerance", type=float, default=1e-4)
    parser.add_argument("--activation", choices=[a.value for a in Activation], default=Activation.RELU.value)
    parser.add_argument("--coding-mode", choices=[m.value for m in CodingMode],
                        default=CodingMode.WEAK_TO_STRONG.value)
    parser.add_argument("--inject-wrong-sign", action="store_true", help=argparse.SUPPRESS)
    parser.set_defaults(handler=cmd_gradcheck)


def cmd_gradcheck(args: argparse.Namespace) -> int:
    service = GradCheckService(
        n_views=args.views,
        activation=Activation(args.activation),
        seed=args.seed or 0,
        coding_mode=CodingMode(args.coding_mode),
    )
    terms = None if args.term == "all" else [args.term]
    results = service.run(terms, args.tolerance, args.inject_wrong_sign)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.term:<6} {status} max_rel_error={result.max_rel_error:.3e} checked={result.checked}")
    failed = [result.term for result in results if not result.passed]
    if failed:
        raise GradientCheckError(f"Gradientes incorrectos en: {', '.join(failed)}")
    return 0

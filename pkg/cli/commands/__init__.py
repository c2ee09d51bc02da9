"""
Registro de subcomandos de la CLI
"""
from cli.commands import ablate, evaluate, gradcheck, metrics, synth, train

COMMANDS = [synth, train, evaluate, ablate, gradcheck, metrics]

__all__ = ["COMMANDS"]

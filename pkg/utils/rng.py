"""
Derivación de generadores aleatorios por propósito

Toda la aleatoriedad nace de una única semilla; cada componente usa su propio
flujo `SeedSequence([seed, stream, *keys])`, de modo que puede probarse aislado
y aun así componerse de forma determinista.
"""
from enum import IntEnum

import numpy as np


class RngStream(IntEnum):
    """Identificadores de flujo"""
    INIT = 1
    SHUFFLE = 2
    MASK = 3
    SYNTH = 4
    KMEANS = 5
    GRADCHECK = 6


def derive_rng(seed: int, stream: RngStream, *keys: int) -> np.random.Generator:
    """Crea el generador del flujo `stream` para la semilla dada"""
    sequence = np.random.SeedSequence([int(seed), int(stream), *(int(k) for k in keys)])
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed: int, stream: RngStream, *keys: int) -> int:
    """Semilla entera de 32 bits para librerías que piden `random_state`"""
    sequence = np.random.SeedSequence([int(seed), int(stream), *(int(k) for k in keys)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])

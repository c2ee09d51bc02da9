"""
Autoencoders por vista y pasada hacia adelante multivista

Z es la salida lineal del encoder (antes del softmax) e Y = softmax(Z).
Z alimenta la pérdida global y la fusión; Y alimenta las pérdidas
probabilísticas. El decoder termina en una capa lineal sin compresión.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.augment import DropMask, apply_mask
from core.nn import ACTIVATIONS, LinearLayer, linear_backward, linear_forward
from core.numerics import DenseMatrix, softmax_rows, softmax_rows_backward
from models.entities import Activation
from utils.exceptions import HcnValidationError, ShapeMismatchError


@dataclass
class PassCache:
    """Entradas de cada capa y preactivaciones ocultas de una pasada"""
    inputs: List[DenseMatrix] = field(default_factory=list)
    pre_activations: List[DenseMatrix] = field(default_factory=list)


def mlp_forward(layers: Sequence[LinearLayer], x: DenseMatrix,
                activation: Activation) -> Tuple[DenseMatrix, PassCache]:
    """Capas lineales con activación en las ocultas y salida lineal"""
    forward_fn, _ = ACTIVATIONS[activation]
    cache = PassCache()
    h = x
    last = len(layers) - 1
    for index, layer in enumerate(layers):
        cache.inputs.append(h)
        a = linear_forward(layer, h)
        if index < last:
            cache.pre_activations.append(a)
            h = forward_fn(a)
        else:
            h = a
    return h, cache


def mlp_backward(layers: Sequence[LinearLayer], cache: PassCache, upstream: DenseMatrix,
                 activation: Activation) -> DenseMatrix:
    """Acumula gradientes en las capas y devuelve el gradiente de la entrada"""
    _, backward_fn = ACTIVATIONS[activation]
    g = upstream
    last = len(layers) - 1
    for index in range(last, -1, -1):
        if index < last:
            g = backward_fn(cache.pre_activations[index], g)
        g = linear_backward(layers[index], cache.inputs[index], g)
    return g


@dataclass
class ViewAutoencoder:
    """Encoder f(·|θ) y decoder g(·|φ) de una vista"""
    encoder: List[LinearLayer]
    decoder: List[LinearLayer]
    activation: Activation = Activation.RELU

    def __post_init__(self) -> None:
        for chain in (self.encoder, self.decoder):
            if not chain:
                raise HcnValidationError("El encoder y el decoder necesitan al menos una capa")
            for previous, current in zip(chain, chain[1:]):
                if previous.d_out != current.d_in:
                    raise ShapeMismatchError(
                        f"Cadena de capas inconsistente: {previous.d_out} → {current.d_in}"
                    )
        if self.encoder[-1].d_out != self.decoder[0].d_in:
            raise ShapeMismatchError("El ancho de salida del encoder debe ser el de entrada del decoder")
        if self.decoder[-1].d_out != self.encoder[0].d_in:
            raise ShapeMismatchError("El decoder debe reconstruir la dimensión de la vista")

    @classmethod
    def build(cls, d_v: int, d_out: int, hidden_widths: Sequence[int],
              activation: Activation, rng: np.random.Generator) -> "ViewAutoencoder":
        """Encoder [d_v, *hidden, d_out] y decoder espejo [d_out, *hidden invertido, d_v]"""
        enc_dims = [d_v, *hidden_widths, d_out]
        dec_dims = enc_dims[::-1]
        encoder = [LinearLayer.glorot(a, b, rng) for a, b in zip(enc_dims, enc_dims[1:])]
        decoder = [LinearLayer.glorot(a, b, rng) for a, b in zip(dec_dims, dec_dims[1:])]
        return cls(encoder, decoder, activation)

    @property
    def d_v(self) -> int:
        return self.encoder[0].d_in

    @property
    def d_out(self) -> int:
        return self.encoder[-1].d_out

    @property
    def layers(self) -> List[LinearLayer]:
        return [*self.encoder, *self.decoder]

    def parameters(self) -> List[np.ndarray]:
        return [p for layer in self.layers for p in layer.parameters()]

    def gradients(self) -> List[np.ndarray]:
        return [g for layer in self.layers for g in layer.gradients()]

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()


@dataclass
class HcnModel:
    """Conjunto de autoencoders, uno por vista, con ancho latente común"""
    views: List[ViewAutoencoder]

    def __post_init__(self) -> None:
        if len(self.views) < 2:
            raise HcnValidationError("HCN requiere al menos dos vistas")
        if len({view.d_out for view in self.views}) != 1:
            raise ShapeMismatchError("Todas las vistas deben compartir D_out")

    @classmethod
    def build(cls, view_dims: Sequence[int], d_out: int, hidden_widths: Sequence[int],
              activation: Activation, rng: np.random.Generator) -> "HcnModel":
        return cls([
            ViewAutoencoder.build(d_v, d_out, hidden_widths, activation, rng)
            for d_v in view_dims
        ])

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def d_out(self) -> int:
        return self.views[0].d_out

    @property
    def view_dims(self) -> List[int]:
        return [view.d_v for view in self.views]

    def parameters(self) -> List[np.ndarray]:
        return [p for view in self.views for p in view.parameters()]

    def gradients(self) -> List[np.ndarray]:
        return [g for view in self.views for g in view.gradients()]

    def zero_grad(self) -> None:
        for view in self.views:
            view.zero_grad()


def encode(view: ViewAutoencoder, x: DenseMatrix) -> DenseMatrix:
    """Z = salida de la última capa lineal del encoder"""
    if x.ndim != 2 or x.shape[1] != view.d_v:
        raise ShapeMismatchError(f"Entrada {x.shape} para una vista de dimensión {view.d_v}")
    z, _ = mlp_forward(view.encoder, x, view.activation)
    return z


def class_probs(z: DenseMatrix) -> DenseMatrix:
    """Probabilidades a posteriori de las D_out clases latentes"""
    return softmax_rows(z)


def decode(view: ViewAutoencoder, z: DenseMatrix) -> DenseMatrix:
    """X̂ de forma n×d_v"""
    if z.ndim != 2 or z.shape[1] != view.d_out:
        raise ShapeMismatchError(f"Latente {z.shape} para un decoder de entrada {view.d_out}")
    x_hat, _ = mlp_forward(view.decoder, z, view.activation)
    return x_hat


@dataclass(frozen=True)
class ViewForward:
    """Tensores de una vista en una pasada"""
    x: DenseMatrix
    x_aug: DenseMatrix
    z: DenseMatrix
    z_aug: DenseMatrix
    y: DenseMatrix
    y_aug: DenseMatrix
    x_hat: DenseMatrix
    x_hat_aug: DenseMatrix
    encoder_cache: PassCache = field(repr=False)
    encoder_aug_cache: PassCache = field(repr=False)
    decoder_cache: PassCache = field(repr=False)
    decoder_aug_cache: PassCache = field(repr=False)


@dataclass(frozen=True)
class ForwardBundle:
    """Z, Z_aug, Y, Y_aug, X̂, X̂_aug de todas las vistas"""
    views: List[ViewForward]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def batch_size(self) -> int:
        return int(self.views[0].x.shape[0])

    @property
    def z(self) -> List[DenseMatrix]:
        return [view.z for view in self.views]

    @property
    def z_aug(self) -> List[DenseMatrix]:
        return [view.z_aug for view in self.views]

    @property
    def y(self) -> List[DenseMatrix]:
        return [view.y for view in self.views]

    @property
    def y_aug(self) -> List[DenseMatrix]:
        return [view.y_aug for view in self.views]

    def min_abs_pre_activation(self) -> float:
        """Distancia mínima a un quiebre de la activación en toda la pasada"""
        values = [
            float(np.min(np.abs(pre)))
            for view in self.views
            for cache in (view.encoder_cache, view.encoder_aug_cache,
                          view.decoder_cache, view.decoder_aug_cache)
            for pre in cache.pre_activations
            if pre.size
        ]
        return min(values) if values else float("inf")


def forward_all(model: HcnModel, batch: Sequence[DenseMatrix],
                masks: Optional[Sequence[DropMask]] = None) -> ForwardBundle:
    """Calcula todos los tensores del lote para cada vista"""
    if len(batch) != model.n_views:
        raise ShapeMismatchError(f"Se esperaban {model.n_views} vistas, llegaron {len(batch)}")
    if len({x.shape[0] for x in batch}) != 1:
        raise ShapeMismatchError("Las vistas del lote no están alineadas por filas")
    if masks is not None and len(masks) != model.n_views:
        raise ShapeMismatchError("Se necesita una máscara por vista")

    outputs = []
    for index, (view, x) in enumerate(zip(model.views, batch)):
        if x.ndim != 2 or x.shape[1] != view.d_v:
            raise ShapeMismatchError(f"Vista {index}: entrada {x.shape}, se esperaba ancho {view.d_v}")
        x_aug = x if masks is None else apply_mask(x, masks[index])

        z, enc_cache = mlp_forward(view.encoder, x, view.activation)
        z_aug, enc_aug_cache = mlp_forward(view.encoder, x_aug, view.activation)
        x_hat, dec_cache = mlp_forward(view.decoder, z, view.activation)
        x_hat_aug, dec_aug_cache = mlp_forward(view.decoder, z_aug, view.activation)

        outputs.append(ViewForward(
            x=x, x_aug=x_aug,
            z=z, z_aug=z_aug,
            y=class_probs(z), y_aug=class_probs(z_aug),
            x_hat=x_hat, x_hat_aug=x_hat_aug,
            encoder_cache=enc_cache, encoder_aug_cache=enc_aug_cache,
            decoder_cache=dec_cache, decoder_aug_cache=dec_aug_cache,
        ))
    return ForwardBundle(outputs)


@dataclass
class ViewGradients:
    """Gradientes de la pérdida respecto a los tensores de una vista"""
    z: Optional[DenseMatrix] = None
    z_aug: Optional[DenseMatrix] = None
    y: Optional[DenseMatrix] = None
    y_aug: Optional[DenseMatrix] = None
    x_hat: Optional[DenseMatrix] = None
    x_hat_aug: Optional[DenseMatrix] = None

    def add(self, name: str, value: DenseMatrix) -> None:
        current = getattr(self, name)
        setattr(self, name, value.copy() if current is None else current + value)


def backward_all(model: HcnModel, bundle: ForwardBundle,
                 grads: Sequence[ViewGradients]) -> None:
    """Retropropaga los gradientes de los tensores hasta los parámetros"""
    for view, out, g in zip(model.views, bundle.views, grads):
        dz = np.zeros_like(out.z) if g.z is None else g.z.copy()
        dz_aug = np.zeros_like(out.z_aug) if g.z_aug is None else g.z_aug.copy()

        if g.x_hat is not None:
            dz += mlp_backward(view.decoder, out.decoder_cache, g.x_hat, view.activation)
        if g.x_hat_aug is not None:
            dz_aug += mlp_backward(view.decoder, out.decoder_aug_cache, g.x_hat_aug, view.activation)
        if g.y is not None:
            dz += softmax_rows_backward(out.y, g.y)
        if g.y_aug is not None:
            dz_aug += softmax_rows_backward(out.y_aug, g.y_aug)

        mlp_backward(view.encoder, out.encoder_cache, dz, view.activation)
        mlp_backward(view.encoder, out.encoder_aug_cache, dz_aug, view.activation)

"""Encoder/decoder/discriminator triple, loss terms, joint training, checkpoints.

The encoder maps a 200-dimensional airfoil to a 32-dimensional Gaussian
posterior (mu, logvar); the decoder maps latent vectors back to airfoils
through a tanh output; the discriminator scores realness through a sigmoid
and exposes its second hidden layer as the feature representation used by
both the layer-matching loss and FID.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field, asdict

import numpy as np

from . import neuralnet as nn
from .errors import (
    CorruptChecksum,
    EmptyDataset,
    IoFailure,
    NonFiniteLoss,
    OutOfRangeProbability,
    ShapeMismatch,
    VersionMismatch,
)

INPUT_DIM = 200
LATENT_DIM = 32
FEATURE_DIM = 128
FEATURE_LAYER = 1  # second hidden layer of the discriminator
LOGVAR_CLAMP = 10.0
PROB_CLAMP = 1e-7

CHECKPOINT_MAGIC = b"AFGCKPT\x00"
CHECKPOINT_VERSION = "v1"


@dataclass
class TrainConfig:
    epochs: int = 5000
    lr_initial: float = 5e-4
    lr_after_decay: float = 5e-5
    decay_epoch: int = 2500
    batch_size: int = 16
    w_prior: float = 0.1
    w_layer: float = 0.1
    w_recon: float = 10.0
    w_gan_dec: float = 5.0
    seed: int = 0

    def __post_init__(self):
        positives = [
            self.epochs,
            self.lr_initial,
            self.lr_after_decay,
            self.batch_size,
            self.w_prior,
            self.w_layer,
            self.w_recon,
            self.w_gan_dec,
        ]
        if any(v <= 0 for v in positives):
            raise ValueError("all training hyperparameters must be positive")
        if self.decay_epoch >= self.epochs and self.epochs > 1:
            # a decay point past the end simply never triggers; only reject
            # obviously inconsistent configs
            pass


@dataclass
class Encoder:
    trunk: nn.Mlp  # 200 -> 256 -> 128, leaky_relu
    head_mu: nn.Mlp  # 128 -> 32, identity
    head_logvar: nn.Mlp  # 128 -> 32, identity

    def parameters(self) -> list[np.ndarray]:
        return (
            self.trunk.parameters()
            + self.head_mu.parameters()
            + self.head_logvar.parameters()
        )


@dataclass
class VaeGanModel:
    encoder: Encoder
    decoder: nn.Mlp  # 32 -> 128 -> 256 -> 200, tanh output
    discriminator: nn.Mlp | None  # 200 -> 256 -> 128 -> 1, sigmoid output
    scale: float = 1.0
    config: TrainConfig = field(default_factory=TrainConfig)
    epoch: int = 0
    rng_summary: str = ""

    @property
    def kind(self) -> str:
        return "vaegan" if self.discriminator is not None else "vae"


def build_encoder(rng: np.random.Generator) -> Encoder:
    trunk = nn.glorot_init(
        [INPUT_DIM, 256, FEATURE_DIM], ["leaky_relu", "leaky_relu"], rng
    )
    head_mu = nn.glorot_init([FEATURE_DIM, LATENT_DIM], ["identity"], rng)
    head_logvar = nn.glorot_init([FEATURE_DIM, LATENT_DIM], ["identity"], rng)
    return Encoder(trunk, head_mu, head_logvar)


def build_decoder(rng: np.random.Generator) -> nn.Mlp:
    return nn.glorot_init(
        [LATENT_DIM, 128, 256, INPUT_DIM], ["leaky_relu", "leaky_relu", "tanh"], rng
    )


def build_discriminator(rng: np.random.Generator) -> nn.Mlp:
    return nn.glorot_init(
        [INPUT_DIM, 256, FEATURE_DIM, 1], ["leaky_relu", "leaky_relu", "sigmoid"], rng
    )


def build_model(seed: int, with_discriminator: bool = True, **cfg) -> VaeGanModel:
    config = TrainConfig(seed=seed, **cfg)
    rng = np.random.Generator(np.random.PCG64(seed))
    return VaeGanModel(
        encoder=build_encoder(rng),
        decoder=build_decoder(rng),
        discriminator=build_discriminator(rng) if with_discriminator else None,
        config=config,
    )


# --- inference -------------------------------------------------------------


def encode(encoder: Encoder, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior parameters (mu, logvar); logvar clamped to +-LOGVAR_CLAMP."""
    h, _ = nn.forward(encoder.trunk, x)
    mu, _ = nn.forward(encoder.head_mu, h)
    logvar_raw, _ = nn.forward(encoder.head_logvar, h)
    return mu, np.clip(logvar_raw, -LOGVAR_CLAMP, LOGVAR_CLAMP)


def reparameterize(
    mu: np.ndarray, logvar: np.ndarray, eps: np.ndarray
) -> np.ndarray:
    if mu.shape != logvar.shape or mu.shape != eps.shape:
        raise ShapeMismatch(
            f"mu {mu.shape}, logvar {logvar.shape}, eps {eps.shape}"
        )
    return mu + np.exp(logvar / 2.0) * eps


def decode(decoder: nn.Mlp, z: np.ndarray) -> np.ndarray:
    out, _ = nn.forward(decoder, z)
    return out


def discriminate(discriminator: nn.Mlp, x: np.ndarray) -> np.ndarray:
    out, _ = nn.forward(discriminator, x)
    return out[:, 0]


def disc_features(discriminator: nn.Mlp, x: np.ndarray) -> np.ndarray:
    """Second-hidden-layer activations (width 128)."""
    _, cache = nn.forward(discriminator, x)
    return cache.inputs[FEATURE_LAYER + 1]


# --- loss values -----------------------------------------------------------


def kl_prior_loss(mu: np.ndarray, logvar: np.ndarray) -> float:
    per_sample = -0.5 * np.sum(1.0 + logvar - mu**2 - np.exp(logvar), axis=1)
    value = float(np.mean(per_sample))
    if not np.isfinite(value):
        raise NonFiniteLoss("KL prior loss is not finite")
    return value


def recon_loss(x_recon: np.ndarray, x: np.ndarray) -> float:
    """Reporting metric: squared error averaged over batch and coordinates."""
    if x_recon.shape != x.shape:
        raise ShapeMismatch(f"{x_recon.shape} vs {x.shape}")
    return float(np.mean((x_recon - x) ** 2))


def recon_objective(x_recon: np.ndarray, x: np.ndarray) -> float:
    """Training objective: batch mean of the squared L2 norm of the residual.

    Summing over the 200 coordinates (rather than averaging) keeps the
    reconstruction pull strong relative to the prior term; averaging both
    makes their per-unit gradients comparable and collapses the posterior.
    """
    if x_recon.shape != x.shape:
        raise ShapeMismatch(f"{x_recon.shape} vs {x.shape}")
    return float(np.mean(np.sum((x_recon - x) ** 2, axis=1)))


def _clamp_probs(d: np.ndarray) -> np.ndarray:
    # exact 0.0/1.0 can legitimately occur when the sigmoid saturates in
    # float64; only values outside [0, 1] (or NaN) indicate a broken input
    if not np.all((d >= 0.0) & (d <= 1.0)):
        raise OutOfRangeProbability("discriminator output outside [0, 1]")
    return np.clip(d, PROB_CLAMP, 1.0 - PROB_CLAMP)


def gan_loss(d_real: np.ndarray, d_recon: np.ndarray, d_fake: np.ndarray) -> float:
    """log D(x) + log(1-D(x_recon)) + log(1-D(x_fake)), batch mean per term."""
    pr = _clamp_probs(d_real)
    pc = _clamp_probs(d_recon)
    pf = _clamp_probs(d_fake)
    return float(
        np.mean(np.log(pr)) + np.mean(np.log(1.0 - pc)) + np.mean(np.log(1.0 - pf))
    )


def layer_loss(
    discriminator: nn.Mlp, x_real: np.ndarray, x_gen: np.ndarray
) -> float:
    """Mean absolute feature-layer difference, paired by batch index."""
    f_real = disc_features(discriminator, x_real)
    f_gen = disc_features(discriminator, x_gen)
    if f_real.shape != f_gen.shape:
        raise ShapeMismatch(f"{f_real.shape} vs {f_gen.shape}")
    return float(np.mean(np.abs(f_real - f_gen)))


# --- episode: one full forward pass with caches ----------------------------


@dataclass
class _Episode:
    x: np.ndarray
    eps: np.ndarray
    zhat: np.ndarray | None
    trunk_cache: nn.ForwardCache
    mu_cache: nn.ForwardCache
    lv_cache: nn.ForwardCache
    mu: np.ndarray
    logvar_raw: np.ndarray
    logvar: np.ndarray
    z: np.ndarray
    xt: np.ndarray  # reconstruction Dec(z)
    xt_cache: nn.ForwardCache
    xh: np.ndarray | None  # sampled Dec(zhat)
    xh_cache: nn.ForwardCache | None
    d_caches: dict  # 'real'/'recon'/'fake' -> (probs, ForwardCache)
    values: dict


def _run_episode(
    model: VaeGanModel,
    x: np.ndarray,
    eps: np.ndarray,
    zhat: np.ndarray | None,
) -> _Episode:
    enc = model.encoder
    h, trunk_cache = nn.forward(enc.trunk, x)
    mu, mu_cache = nn.forward(enc.head_mu, h)
    logvar_raw, lv_cache = nn.forward(enc.head_logvar, h)
    logvar = np.clip(logvar_raw, -LOGVAR_CLAMP, LOGVAR_CLAMP)
    z = reparameterize(mu, logvar, eps)
    xt, xt_cache = nn.forward(model.decoder, z)

    xh = xh_cache = None
    d_caches = {}
    values = {
        "prior": kl_prior_loss(mu, logvar),
        "recon": recon_objective(xt, x),
        "recon_metric": recon_loss(xt, x),
    }
    if model.discriminator is not None:
        if zhat is None:
            raise ShapeMismatch("zhat required for a model with a discriminator")
        xh, xh_cache = nn.forward(model.decoder, zhat)
        for key, inp in (("real", x), ("recon", xt), ("fake", xh)):
            out, cache = nn.forward(model.discriminator, inp)
            d_caches[key] = (out[:, 0], cache)
        values["gan"] = gan_loss(
            d_caches["real"][0], d_caches["recon"][0], d_caches["fake"][0]
        )
        pc = _clamp_probs(d_caches["recon"][0])
        pf = _clamp_probs(d_caches["fake"][0])
        # generator-side objective in its literal min-max form,
        # log(1 - D(generated)); its gradient stays bounded while the
        # discriminator confidently rejects generated samples
        values["gan_dec"] = float(
            np.mean(np.log(1.0 - pc)) + np.mean(np.log(1.0 - pf))
        )
        f_real = d_caches["real"][1].inputs[FEATURE_LAYER + 1]
        f_rec = d_caches["recon"][1].inputs[FEATURE_LAYER + 1]
        f_fake = d_caches["fake"][1].inputs[FEATURE_LAYER + 1]
        # training objective, averaged over the two generated branches:
        # - reconstruction branch: per-sample l1 norm of the feature residual
        #   (pairing by batch index is meaningful: same underlying airfoil)
        # - sampled branch: l1 norm of the difference of batch-average
        #   feature activations (feature matching; random samples have no
        #   meaningful per-index pairing with real airfoils)
        values["layer"] = 0.5 * (
            float(np.mean(np.sum(np.abs(f_real - f_rec), axis=1)))
            + float(np.sum(np.abs(f_real.mean(axis=0) - f_fake.mean(axis=0))))
        )
        values["layer_metric"] = values["layer"] / f_real.shape[1]
    return _Episode(
        x=x,
        eps=eps,
        zhat=zhat,
        trunk_cache=trunk_cache,
        mu_cache=mu_cache,
        lv_cache=lv_cache,
        mu=mu,
        logvar_raw=logvar_raw,
        logvar=logvar,
        z=z,
        xt=xt,
        xt_cache=xt_cache,
        xh=xh,
        xh_cache=xh_cache,
        d_caches=d_caches,
        values=values,
    )


def _zeros_like_params(params: list[np.ndarray]) -> list[np.ndarray]:
    return [np.zeros_like(p) for p in params]


def _accumulate(acc: list[np.ndarray], grads: list[np.ndarray]) -> None:
    for a, g in zip(acc, grads):
        a += g


def _term_grads(
    model: VaeGanModel,
    ep: _Episode,
    weights: dict[str, float],
    components: frozenset[str] | set[str],
) -> dict[str, list[np.ndarray]]:
    """Full-chain gradients of sum(weights[term] * term) w.r.t. the chosen
    components' parameters. Terms: prior, recon, layer, gan, gan_dec."""
    batch = ep.x.shape[0]
    disc = model.discriminator
    out: dict[str, list[np.ndarray]] = {}
    disc_acc = (
        _zeros_like_params(disc.parameters()) if disc is not None else None
    )

    d_mu = np.zeros_like(ep.mu)
    d_lv = np.zeros_like(ep.logvar)
    d_xt = np.zeros_like(ep.xt)
    d_xh = np.zeros_like(ep.xh) if ep.xh is not None else None

    w = weights.get("prior", 0.0)
    if w:
        d_mu += w * ep.mu / batch
        d_lv += w * 0.5 * (np.exp(ep.logvar) - 1.0) / batch

    w = weights.get("recon", 0.0)
    if w:
        d_xt += w * 2.0 * (ep.xt - ep.x) / batch

    w = weights.get("gan", 0.0)
    if w:
        pr, cache_r = ep.d_caches["real"]
        pc, cache_c = ep.d_caches["recon"]
        pf, cache_f = ep.d_caches["fake"]
        for probs, cache, sign_real, sink in (
            (pr, cache_r, True, None),
            (pc, cache_c, False, "xt"),
            (pf, cache_f, False, "xh"),
        ):
            clamped = np.clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
            mask = (probs > PROB_CLAMP) & (probs < 1.0 - PROB_CLAMP)
            if sign_real:
                u = w * mask / (batch * clamped)
            else:
                u = -w * mask / (batch * (1.0 - clamped))
            grads, dx = nn.backward(disc, cache, u[:, None])
            if disc_acc is not None:
                _accumulate(disc_acc, nn.flat_grads(grads))
            if sink == "xt":
                d_xt += dx
            elif sink == "xh":
                d_xh += dx

    w = weights.get("gan_dec", 0.0)
    if w:
        for key, sink in (("recon", "xt"), ("fake", "xh")):
            probs, cache = ep.d_caches[key]
            clamped = np.clip(probs, PROB_CLAMP, 1.0 - PROB_CLAMP)
            mask = (probs > PROB_CLAMP) & (probs < 1.0 - PROB_CLAMP)
            u = -w * mask / (batch * (1.0 - clamped))
            grads, dx = nn.backward(disc, cache, u[:, None])
            if disc_acc is not None:
                _accumulate(disc_acc, nn.flat_grads(grads))
            if sink == "xt":
                d_xt += dx
            else:
                d_xh += dx

    w = weights.get("layer", 0.0)
    if w:
        cache_r = ep.d_caches["real"][1]
        cache_c = ep.d_caches["recon"][1]
        cache_f = ep.d_caches["fake"][1]
        f_real = cache_r.inputs[FEATURE_LAYER + 1]
        f_rec = cache_c.inputs[FEATURE_LAYER + 1]
        f_fake = cache_f.inputs[FEATURE_LAYER + 1]
        norm = 0.5 * w / f_real.shape[0]
        s_rec = np.sign(f_real - f_rec)
        s_fake = np.broadcast_to(
            np.sign(f_real.mean(axis=0) - f_fake.mean(axis=0)), f_real.shape
        )
        for cache, u, sink in (
            (cache_r, norm * (s_rec + s_fake), None),
            (cache_c, -norm * s_rec, "xt"),
            (cache_f, -norm * s_fake, "xh"),
        ):
            grads, dx = nn.backward_partial(disc, cache, u, FEATURE_LAYER)
            if disc_acc is not None:
                flat = []
                for gw, gb in grads:
                    flat.extend([gw, gb])
                # only the first FEATURE_LAYER+1 layers receive gradient
                _accumulate(disc_acc[: len(flat)], flat)
            if sink == "xt":
                d_xt += dx
            elif sink == "xh":
                d_xh += dx

    # decoder
    dec_grads_acc = _zeros_like_params(model.decoder.parameters())
    d_z = np.zeros_like(ep.z)
    if np.any(d_xt):
        grads, d_z_part = nn.backward(model.decoder, ep.xt_cache, d_xt)
        _accumulate(dec_grads_acc, nn.flat_grads(grads))
        d_z += d_z_part
    if d_xh is not None and np.any(d_xh):
        grads, _ = nn.backward(model.decoder, ep.xh_cache, d_xh)
        _accumulate(dec_grads_acc, nn.flat_grads(grads))

    # encoder, through the reparameterization
    d_mu += d_z
    d_lv += d_z * ep.eps * 0.5 * np.exp(ep.logvar / 2.0)
    lv_mask = (ep.logvar_raw > -LOGVAR_CLAMP) & (ep.logvar_raw < LOGVAR_CLAMP)
    d_lv_raw = d_lv * lv_mask
    enc = model.encoder
    mu_grads, dh_mu = nn.backward(enc.head_mu, ep.mu_cache, d_mu)
    lv_grads, dh_lv = nn.backward(enc.head_logvar, ep.lv_cache, d_lv_raw)
    trunk_grads, _ = nn.backward(enc.trunk, ep.trunk_cache, dh_mu + dh_lv)
    enc_acc = (
        nn.flat_grads(trunk_grads) + nn.flat_grads(mu_grads) + nn.flat_grads(lv_grads)
    )

    if "enc" in components:
        out["enc"] = enc_acc
    if "dec" in components:
        out["dec"] = dec_grads_acc
    if "disc" in components and disc_acc is not None:
        out["disc"] = disc_acc
    return out


def loss_term_value(
    model: VaeGanModel,
    x: np.ndarray,
    eps: np.ndarray,
    zhat: np.ndarray | None,
    term: str,
) -> float:
    """Scalar value of one loss term under fixed noise draws."""
    ep = _run_episode(model, x, eps, zhat)
    return ep.values[term]


def loss_term_grads(
    model: VaeGanModel,
    x: np.ndarray,
    eps: np.ndarray,
    zhat: np.ndarray | None,
    term: str,
) -> dict[str, list[np.ndarray]]:
    """Analytic gradients of one loss term for all components."""
    ep = _run_episode(model, x, eps, zhat)
    comps = {"enc", "dec"} | ({"disc"} if model.discriminator is not None else set())
    return _term_grads(model, ep, {term: 1.0}, comps)


# --- training --------------------------------------------------------------


def _check_finite(values: dict, epoch: int) -> None:
    for key, v in values.items():
        if not np.isfinite(v):
            raise NonFiniteLoss(f"{key} loss became {v} at epoch {epoch}")


def train_vaegan(
    data: np.ndarray,
    config: TrainConfig,
    scale: float = 1.0,
    log_rows: list | None = None,
) -> VaeGanModel:
    """Joint adversarial training; returns the trained model.

    Per batch: update discriminator on the GAN loss, then decoder on
    w_prior*prior + w_layer*layer + w_recon*recon + w_gan_dec*gan_dec, then
    encoder on w_prior*prior + w_layer*layer + w_recon*recon, each from a
    fresh forward pass.
    """
    return _train(data, config, scale, with_disc=True, log_rows=log_rows)


def train_vae(
    data: np.ndarray,
    config: TrainConfig,
    scale: float = 1.0,
    log_rows: list | None = None,
) -> VaeGanModel:
    """Plain VAE baseline: same encoder/decoder, no discriminator."""
    return _train(data, config, scale, with_disc=False, log_rows=log_rows)


def _train(
    data: np.ndarray,
    config: TrainConfig,
    scale: float,
    with_disc: bool,
    log_rows: list | None,
) -> VaeGanModel:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise EmptyDataset("training data must be a non-empty (n, 200) array")
    if data.shape[1] != INPUT_DIM:
        raise ShapeMismatch(f"expected {INPUT_DIM} coordinates, got {data.shape[1]}")

    rng = np.random.Generator(np.random.PCG64(config.seed))
    model = VaeGanModel(
        encoder=build_encoder(rng),
        decoder=build_decoder(rng),
        discriminator=build_discriminator(rng) if with_disc else None,
        scale=scale,
        config=config,
    )
    enc_params = model.encoder.parameters()
    dec_params = model.decoder.parameters()
    opt_enc = nn.AdamState.for_params(enc_params, config.lr_initial)
    opt_dec = nn.AdamState.for_params(dec_params, config.lr_initial)
    if with_disc:
        disc_params = model.discriminator.parameters()
        opt_disc = nn.AdamState.for_params(disc_params, config.lr_initial)

    n = data.shape[0]
    enc_weights = {
        "prior": config.w_prior,
        "recon": config.w_recon,
    }
    dec_weights = dict(enc_weights)
    if with_disc:
        enc_weights["layer"] = config.w_layer
        dec_weights["layer"] = config.w_layer
        dec_weights["gan_dec"] = config.w_gan_dec

    for epoch in range(1, config.epochs + 1):
        lr = config.lr_initial if epoch <= config.decay_epoch else config.lr_after_decay
        opt_enc.lr = opt_dec.lr = lr
        if with_disc:
            opt_disc.lr = lr

        perm = rng.permutation(n)
        sums = {"recon": 0.0, "prior": 0.0, "layer": 0.0, "gan": 0.0}
        n_batches = 0
        for start in range(0, n, config.batch_size):
            x = data[perm[start : start + config.batch_size]]
            b = x.shape[0]
            eps = rng.standard_normal((b, LATENT_DIM))
            zhat = rng.standard_normal((b, LATENT_DIM)) if with_disc else None

            if with_disc:
                ep = _run_episode(model, x, eps, zhat)
                _check_finite(ep.values, epoch)
                for key in sums:
                    src = key + "_metric" if key in ("recon", "layer") else key
                    sums[key] += ep.values.get(src, 0.0)
                grads = _term_grads(model, ep, {"gan": -1.0}, {"disc"})
                nn.adam_step(opt_disc, disc_params, grads["disc"])

                ep = _run_episode(model, x, eps, zhat)
                grads = _term_grads(model, ep, dec_weights, {"dec"})
                nn.adam_step(opt_dec, dec_params, grads["dec"])

                ep = _run_episode(model, x, eps, zhat)
                grads = _term_grads(model, ep, enc_weights, {"enc"})
                nn.adam_step(opt_enc, enc_params, grads["enc"])
            else:
                ep = _run_episode(model, x, eps, None)
                _check_finite(ep.values, epoch)
                sums["recon"] += ep.values["recon_metric"]
                sums["prior"] += ep.values["prior"]
                grads = _term_grads(model, ep, dec_weights, {"dec"})
                nn.adam_step(opt_dec, dec_params, grads["dec"])

                ep = _run_episode(model, x, eps, None)
                grads = _term_grads(model, ep, enc_weights, {"enc"})
                nn.adam_step(opt_enc, enc_params, grads["enc"])
            n_batches += 1

        model.epoch = epoch
        if log_rows is not None:
            log_rows.append(
                {
                    "epoch": epoch,
                    "recon": sums["recon"] / n_batches,
                    "prior": sums["prior"] / n_batches,
                    "layer": sums["layer"] / n_batches,
                    "gan": sums["gan"] / n_batches,
                    "lr": lr,
                }
            )

    digest = hashlib.blake2b(rng.bit_generator.state["state"]["state"].to_bytes(16, "little"), digest_size=8).hexdigest()
    model.rng_summary = digest
    return model


def dataset_mse(model: VaeGanModel, data: np.ndarray) -> float:
    """Reconstruction MSE of the deterministic mu -> decode path."""
    mu, _ = encode(model.encoder, data)
    recon = decode(model.decoder, mu)
    return recon_loss(recon, data)


def write_train_log(path, rows: list[dict]) -> None:
    with open(path, "w") as fh:
        fh.write("epoch,L_recon,L_prior,L_layer,L_GAN,lr\n")
        for r in rows:
            fh.write(
                f"{r['epoch']},{r['recon']!r},{r['prior']!r},"
                f"{r['layer']!r},{r['gan']!r},{r['lr']!r}\n"
            )


# --- checkpoint persistence ------------------------------------------------


def _named_tensors(model: VaeGanModel) -> list[tuple[str, np.ndarray]]:
    out = []

    def add(prefix: str, net: nn.Mlp):
        for i, layer in enumerate(net.layers):
            out.append((f"{prefix}.{i}.weights", layer.weights))
            out.append((f"{prefix}.{i}.bias", layer.bias))

    add("encoder.trunk", model.encoder.trunk)
    add("encoder.head_mu", model.encoder.head_mu)
    add("encoder.head_logvar", model.encoder.head_logvar)
    add("decoder", model.decoder)
    if model.discriminator is not None:
        add("discriminator", model.discriminator)
    return out


def save_checkpoint(model: VaeGanModel, path) -> None:
    meta = {
        "kind": model.kind,
        "epoch": model.epoch,
        "scale": model.scale,
        "config": asdict(model.config),
        "rng_summary": model.rng_summary,
    }
    blob = bytearray()
    blob += CHECKPOINT_MAGIC
    version = CHECKPOINT_VERSION.encode().ljust(4, b"\x00")
    blob += version
    meta_bytes = json.dumps(meta, sort_keys=True).encode()
    blob += struct.pack("<Q", len(meta_bytes))
    blob += meta_bytes
    tensors = _named_tensors(model)
    blob += struct.pack("<Q", len(tensors))
    for name, arr in tensors:
        name_b = name.encode()
        blob += struct.pack("<Q", len(name_b))
        blob += name_b
        blob += struct.pack("<Q", arr.ndim)
        for d in arr.shape:
            blob += struct.pack("<Q", d)
        blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    blob += hashlib.blake2b(bytes(blob), digest_size=8).digest()
    try:
        with open(path, "wb") as fh:
            fh.write(bytes(blob))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_checkpoint(path) -> VaeGanModel:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if len(blob) < len(CHECKPOINT_MAGIC) + 12 or not blob.startswith(CHECKPOINT_MAGIC):
        raise CorruptChecksum("not a checkpoint file")
    body, checksum = blob[:-8], blob[-8:]
    if hashlib.blake2b(body, digest_size=8).digest() != checksum:
        raise CorruptChecksum("checksum mismatch (truncated or corrupted file)")
    off = len(CHECKPOINT_MAGIC)
    version = body[off : off + 4].rstrip(b"\x00").decode()
    off += 4
    if version != CHECKPOINT_VERSION:
        raise VersionMismatch(f"checkpoint version {version!r}, reader expects "
                              f"{CHECKPOINT_VERSION!r}")
    (meta_len,) = struct.unpack_from("<Q", body, off)
    off += 8
    meta = json.loads(body[off : off + meta_len].decode())
    off += meta_len
    (n_tensors,) = struct.unpack_from("<Q", body, off)
    off += 8
    tensors: dict[str, np.ndarray] = {}
    for _ in range(n_tensors):
        (name_len,) = struct.unpack_from("<Q", body, off)
        off += 8
        name = body[off : off + name_len].decode()
        off += name_len
        (ndim,) = struct.unpack_from("<Q", body, off)
        off += 8
        shape = []
        for _ in range(ndim):
            (d,) = struct.unpack_from("<Q", body, off)
            off += 8
            shape.append(d)
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(body, dtype="<f8", count=count, offset=off).reshape(shape)
        off += count * 8
        tensors[name] = arr.copy()

    def load_net(prefix: str, activations: list[str]) -> nn.Mlp:
        layers = []
        for i, act in enumerate(activations):
            layers.append(
                nn.DenseLayer(
                    tensors[f"{prefix}.{i}.weights"],
                    tensors[f"{prefix}.{i}.bias"],
                    act,
                )
            )
        return nn.Mlp(layers)

    encoder = Encoder(
        trunk=load_net("encoder.trunk", ["leaky_relu", "leaky_relu"]),
        head_mu=load_net("encoder.head_mu", ["identity"]),
        head_logvar=load_net("encoder.head_logvar", ["identity"]),
    )
    decoder = load_net("decoder", ["leaky_relu", "leaky_relu", "tanh"])
    discriminator = None
    if meta["kind"] == "vaegan":
        discriminator = load_net(
            "discriminator", ["leaky_relu", "leaky_relu", "sigmoid"]
        )
    return VaeGanModel(
        encoder=encoder,
        decoder=decoder,
        discriminator=discriminator,
        scale=float(meta["scale"]),
        config=TrainConfig(**meta["config"]),
        epoch=int(meta["epoch"]),
        rng_summary=meta.get("rng_summary", ""),
    )

#!/usr/bin/env python3
"""Writes config/fixture_model.json: a small 1D model generated outside the C++
code, plus an input field and the output of an independent NumPy forward pass
(analytic spectrum mode) so the loader and the operator can be checked against
it."""

import json
import sys
from pathlib import Path

import numpy as np
from scipy.special import erf

rng = np.random.default_rng(7)
N, H, DA, DU = 64, 6, 1, 1


def arr(a):
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def mlp(d_in, d_out, hidden):
    return {
        "W1": rng.normal(0, 1 / np.sqrt(d_in), (hidden, d_in)),
        "b1": rng.normal(0, 0.1, hidden),
        "W2": rng.normal(0, 1 / np.sqrt(hidden), (d_out, hidden)),
        "b2": rng.normal(0, 0.1, d_out),
    }


def mlp_apply(m, x):  # x: (points, d_in)
    h = np.tanh(x @ m["W1"].T + m["b1"])
    return h @ m["W2"].T + m["b2"]


def ssno_kernel(K):
    return {
        "c": rng.normal(0, 1 / np.sqrt(K), (K, 1)),
        "rho": np.exp(rng.uniform(np.log(0.1), np.log(10), (K, 1))),
        "omega": rng.uniform(-2 * np.pi * K, 2 * np.pi * K, (K, 1)),
        "C_plus": rng.normal(0, 1 / np.sqrt(H), (K, H)),
        "B_plus": rng.normal(0, 1 / np.sqrt(H), (K, H)),
        "C_minus": rng.normal(0, 1 / np.sqrt(H), (K, H)),
        "B_minus": rng.normal(0, 1 / np.sqrt(H), (K, H)),
    }


def half(a):
    return (1 - np.exp(-a / 2)) / a


def ssno_hat(k, xi):
    out = np.zeros((H, H), complex)
    for q in range(k["c"].shape[0]):
        rho, om, c = k["rho"][q, 0], k["omega"][q, 0], k["c"][q, 0]
        fp = half(rho - 1j * (om - 2 * np.pi * xi))
        fm = half(rho + 1j * (om - 2 * np.pi * xi))
        out += c * (fp * np.outer(k["C_plus"][q], k["B_plus"][q]) + fm * np.outer(k["C_minus"][q], k["B_minus"][q]))
    return out


def fno_kernel(K):
    P = rng.normal(0, 1 / np.sqrt(H * (2 * K + 1)), (2 * K + 1, H, H)) + 1j * rng.normal(
        0, 1 / np.sqrt(H * (2 * K + 1)), (2 * K + 1, H, H)
    )
    P[K] = P[K].real
    for k in range(1, K + 1):
        P[K - k] = np.conj(P[K + k])
    return P


def layer_apply(layer, v, hat):
    V = np.fft.fft(v, axis=0) / N
    W = np.zeros_like(V)
    for j in range(N):
        xi = j if j < N // 2 else j - N
        W[j] = hat(xi) @ V[j]
    conv = (np.fft.ifft(W, axis=0) * N).real
    z = v @ layer["W"].T + conv + layer["b"]
    return layer["act"](z)


def gelu(x):
    return 0.5 * x * (1 + erf(x / np.sqrt(2)))


def main(out_path):
    lift = mlp(DA, H, 2 * H)
    project = mlp(H, DU, 2 * H)
    k0 = ssno_kernel(4)
    K1 = 3
    P = fno_kernel(K1)
    layers = [
        {"W": rng.normal(0, 1 / np.sqrt(H), (H, H)), "b": np.zeros(H), "act": gelu},
        {"W": rng.normal(0, 1 / np.sqrt(H), (H, H)), "b": rng.normal(0, 0.1, H), "act": np.tanh},
    ]

    x = np.arange(N) / N
    a = (np.sin(2 * np.pi * x) + 0.3 * np.cos(6 * np.pi * x)).reshape(N, 1)
    v = mlp_apply(lift, a)
    v = layer_apply(layers[0], v, lambda xi: ssno_hat(k0, xi))
    v = layer_apply(layers[1], v, lambda xi: P[xi + K1] if abs(xi) <= K1 else np.zeros((H, H)))
    u = mlp_apply(project, v)

    def mlp_json(m):
        return {"W1": arr(m["W1"]), "b1": arr(m["b1"]), "W2": arr(m["W2"]), "b2": arr(m["b2"]),
                "hidden_activation": {"kind": "tanh"}}

    model = {
        "format": "noperr-model",
        "version": 1,
        "arch": {"dim": 1, "depth": 2, "d_a": DA, "widths": [H, H, H], "d_u": DU},
        "lift": mlp_json(lift),
        "layers": [
            {"W": arr(layers[0]["W"]), "b": arr(layers[0]["b"]),
             "kernel": {"type": "ssno", "form": "sum", "dim": 1, "modes": 4, "d_out": H, "d_in": H,
                        **{key: arr(val) for key, val in k0.items()}},
             "activation": {"kind": "gelu"}},
            {"W": arr(layers[1]["W"]), "b": arr(layers[1]["b"]),
             "kernel": {"type": "fno", "dim": 1, "modes": K1, "d_out": H, "d_in": H,
                        "P_re": arr(P.real), "P_im": arr(P.imag)},
             "activation": {"kind": "tanh"}},
        ],
        "project": mlp_json(project),
        "check": {
            "mode": "analytic",
            "input": {"dim": 1, "n": N, "channels": DA, "values": a.ravel().tolist()},
            "output": {"dim": 1, "n": N, "channels": DU, "values": u.ravel().tolist()},
        },
    }
    Path(out_path).write_text(json.dumps(model, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "config/fixture_model.json")

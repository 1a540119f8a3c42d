#!/usr/bin/env python3
"""
📐 NORMAL CDF - Bivariate standard normal distribution function

Drezner & Wesolowsky (1990) with Genz's refinements: Gauss-Legendre
quadrature over the arcsine of the correlation, plus an asymptotic
expansion when |r| >= 0.925. Absolute error is around 1e-15.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=None)
def _legendre(n_points: int):
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    # shift nodes to (0, 2); the integrals below are written for that range
    return 1.0 + nodes, weights


def bvn_upper(h: float, k: float, r: float) -> float:
    """P(X > h, Y > k) for standard normals with correlation r"""
    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else float(ndtr(-k))
    if k == -math.inf:
        return float(ndtr(-h))
    if r == 0.0:
        return float(ndtr(-h) * ndtr(-k))

    if abs(r) < 0.3:
        x, w = _legendre(6)
    elif abs(r) < 0.75:
        x, w = _legendre(12)
    else:
        x, w = _legendre(20)

    hk = h * k
    bvn = 0.0
    if abs(r) < 0.925:
        hs = (h * h + k * k) / 2.0
        asr = math.asin(r) / 2.0
        sn = np.sin(asr * x)
        bvn = float(np.dot(np.exp((sn * hk - hs) / (1.0 - sn * sn)), w))
        bvn = bvn * asr / TWO_PI + float(ndtr(-h) * ndtr(-k))
    else:
        if r < 0:
            k = -k
            hk = -hk
        if abs(r) < 1:
            a_sq = (1.0 - r) * (1.0 + r)
            a = math.sqrt(a_sq)
            b_sq = (h - k) ** 2
            c = (4.0 - hk) / 8.0
            d = (12.0 - hk) / 16.0
            asr = -(b_sq / a_sq + hk) / 2.0
            if asr > -100:
                bvn = a * math.exp(asr) * (
                    1.0 - c * (b_sq - a_sq) * (1.0 - d * b_sq / 5.0) / 3.0 + c * d * a_sq * a_sq / 5.0
                )
            if hk > -100:
                b = math.sqrt(b_sq)
                sp = math.sqrt(TWO_PI) * float(ndtr(-b / a))
                bvn -= math.exp(-hk / 2.0) * sp * b * (1.0 - c * b_sq * (1.0 - d * b_sq / 5.0) / 3.0)
            a /= 2.0
            xs = (a * x) ** 2
            asr_v = -(b_sq / xs + hk) / 2.0
            keep = asr_v > -100
            xs = xs[keep]
            sp_v = 1.0 + c * xs * (1.0 + d * xs)
            rs = np.sqrt(1.0 - xs)
            ep = np.exp(-(hk / 2.0) * xs / (1.0 + rs) ** 2) / rs
            bvn = (a * float(np.dot(np.exp(asr_v[keep]) * (sp_v - ep), w[keep])) - bvn) / TWO_PI
        if r > 0:
            bvn += float(ndtr(-max(h, k)))
        elif h >= k:
            bvn = -bvn
        else:
            if h < 0:
                span = float(ndtr(k) - ndtr(h))
            else:
                span = float(ndtr(-h) - ndtr(-k))
            bvn = span - bvn
    return min(1.0, max(0.0, bvn))


def bvn_cdf(a: float, b: float, r: float) -> float:
    """P(X <= a, Y <= b) for standard normals with correlation r"""
    if r >= 1.0:
        return float(ndtr(min(a, b)))
    if r <= -1.0:
        return max(0.0, float(ndtr(a) + ndtr(b) - 1.0))
    return bvn_upper(-a, -b, r)

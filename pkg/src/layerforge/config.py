"""JSON configuration.

Example::

    {
      "seed": 0,
      "buckets": [["512x512", 512, 512], [768, 512]],
      "vectorizer": {"k_max": 8, "tau_mse": 25, "tau_color": 12,
                     "simplicity_threshold": 0.98, "turn_policy": "minority",
                     "smooth": false},
      "metrics": {"r_ali": true, "r_ove": true, "r_com": true, "char": true},
      "augment": {"max_retries": 3}
    }

Every key is optional; unknown keys are an error. The file is named by
``--config`` or, failing that, the ``LAYERFORGE_CONFIG`` environment variable.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .buckets import DEFAULT_TABLE, BucketTable
from .vectorizer import TURN_POLICIES, VectorizerConfig

ENV_VAR = "LAYERFORGE_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    seed: int = 0
    buckets: BucketTable = DEFAULT_TABLE
    vectorizer: VectorizerConfig = field(default_factory=VectorizerConfig)
    metrics: dict = field(default_factory=lambda: {"r_ali": True, "r_ove": True, "r_com": True, "char": True})
    max_retries: int = 3


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _number(v, where, lo=None, hi=None, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (integer and not isinstance(v, int)):
        raise ConfigError(f"{where} must be {'an integer' if integer else 'a number'}")
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(f"{where}={v} is outside [{lo}, {hi}]")
    return v


def from_dict(d: dict) -> Config:
    _check_keys(d, {"seed", "buckets", "vectorizer", "metrics", "augment"}, "config")
    cfg = Config()
    if "seed" in d:
        cfg.seed = _number(d["seed"], "seed", 0, 2 ** 64 - 1, integer=True)
    if "buckets" in d:
        try:
            cfg.buckets = BucketTable(d["buckets"])
        except (ValueError, TypeError, IndexError) as e:
            raise ConfigError(f"buckets: {e}") from None
    v = d.get("vectorizer", {})
    _check_keys(v, {"k_max", "tau_mse", "tau_color", "simplicity_threshold", "turn_policy", "smooth"}, "vectorizer")
    kw = {}
    if "k_max" in v:
        kw["k_max"] = _number(v["k_max"], "vectorizer.k_max", 1, 64, integer=True)
    if "tau_mse" in v:
        kw["tau_mse"] = float(_number(v["tau_mse"], "vectorizer.tau_mse", 0))
    if "tau_color" in v:
        kw["tau_color"] = float(_number(v["tau_color"], "vectorizer.tau_color", 0, 512))
    if "simplicity_threshold" in v:
        kw["simplicity_threshold"] = float(_number(v["simplicity_threshold"], "vectorizer.simplicity_threshold", 0, 1))
    if "turn_policy" in v:
        if v["turn_policy"] not in TURN_POLICIES:
            raise ConfigError(f"vectorizer.turn_policy must be one of {sorted(TURN_POLICIES)}")
        kw["turn_policy"] = v["turn_policy"]
    if "smooth" in v:
        if not isinstance(v["smooth"], bool):
            raise ConfigError("vectorizer.smooth must be true or false")
        kw["smooth"] = v["smooth"]
    cfg.vectorizer = VectorizerConfig(seed=cfg.seed, **kw)
    m = d.get("metrics", {})
    _check_keys(m, cfg.metrics.keys(), "metrics")
    for k, val in m.items():
        if not isinstance(val, bool):
            raise ConfigError(f"metrics.{k} must be true or false")
        cfg.metrics[k] = val
    a = d.get("augment", {})
    _check_keys(a, {"max_retries"}, "augment")
    if "max_retries" in a:
        cfg.max_retries = _number(a["max_retries"], "augment.max_retries", 1, 100, integer=True)
    return cfg


def load(path: str | None = None) -> Config:
    path = path or os.environ.get(ENV_VAR) or None
    if not path:
        return Config()
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    return from_dict(data)

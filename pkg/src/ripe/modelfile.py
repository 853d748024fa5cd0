"""JSON model files.

The file is plain JSON so that the selected rules can be read with any
tool.  Floats are written with ``repr`` precision, which makes the round
trip exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .core import InputError, Rule, RuleStats
from .discretize import from_edges
from .generate import MiningParams
from .predict import NoRuleCell, RuleModel, TrainingMeta
from .select import CellTable
from .significance import SignificanceSpec

FORMAT_VERSION = 1


def to_dict(model: RuleModel) -> dict:
    p = model.params
    return {
        "format_version": FORMAT_VERSION,
        "params": {
            "m_n": p.m_n,
            "alpha": p.spec.alpha,
            "z": p.spec.kind,
            "M": p.M,
            "max_complexity": p.max_complexity,
            "fallback_mean": model.fallback_mean,
        },
        "discretizer": {
            "m_n": model.discretizer.m_n,
            "edges": [[float(v) for v in e] for e in model.discretizer.edges],
        },
        "rules": [
            {
                "label": r.label,
                "conditions": [[k, iv.low, iv.high] for k, iv in r.conditions],
                "n_activated": r.stats.n_activated,
                "coverage": r.stats.coverage,
                "mu": r.stats.mu,
                "z": r.stats.z_value,
                "risk": r.stats.single_rule_risk,
            }
            for r in model.rules
        ],
        "prefix_risks": list(model.prefix_risks),
        "cell_table": [
            {"signature": sig, "count": count, "mean": mean}
            for sig, (count, mean) in model.cell_table.cells.items()
        ],
        "no_rule": None if model.no_rule is None else {
            "count": model.no_rule.count,
            "coverage": model.no_rule.coverage,
            "mean": model.no_rule.mean,
            "z": model.no_rule.z_value,
        },
        "global_mean": model.global_mean,
        "training_meta": {
            "n": model.meta.n,
            "d": model.meta.d,
            "feature_names": list(model.meta.feature_names),
            "constant_risk": model.meta.constant_risk,
            "train_risk": model.meta.train_risk,
        },
    }


def from_dict(data: dict) -> RuleModel:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported model format_version {version!r}")
    try:
        p = data["params"]
        params = MiningParams(p["m_n"], SignificanceSpec(p["z"], p["alpha"]), p["M"], p["max_complexity"])
        disc = from_edges(data["discretizer"]["m_n"], data["discretizer"]["edges"])
        rules = []
        for r in data["rules"]:
            stats = RuleStats(None, r["n_activated"], r["coverage"], r["mu"], r["z"], r["risk"])
            rules.append(Rule(tuple((k, (lo, hi)) for k, lo, hi in r["conditions"]), label=r["label"], stats=stats))
        table = CellTable(len(rules), {c["signature"]: (int(c["count"]), float(c["mean"])) for c in data["cell_table"]})
        nr = data["no_rule"]
        no_rule = None if nr is None else NoRuleCell(nr["count"], nr["coverage"], nr["mean"], nr["z"])
        m = data["training_meta"]
        meta = TrainingMeta(m["n"], m["d"], tuple(m["feature_names"]), m["constant_risk"], m["train_risk"])
        model = RuleModel(disc, rules, table, float(data["global_mean"]), params, meta,
                          list(data["prefix_risks"]), no_rule, bool(p["fallback_mean"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model file: {exc}") from exc
    if disc.d != meta.d or any(len(sig) != len(rules) for sig in table.cells):
        raise InputError("model file is internally inconsistent")
    return model


def dumps(model: RuleModel) -> str:
    return json.dumps(to_dict(model), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> RuleModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from exc
    return from_dict(data)


def save(model: RuleModel, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load(path: Union[str, Path]) -> RuleModel:
    return loads(Path(path).read_text(encoding="utf-8"))

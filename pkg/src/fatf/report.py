"""Seeded differential batch: CSV rows plus rendered figures.

Runs three experiment families against independent ground truth and
writes everything into one directory: ``report.csv`` with one row per
instance, ``answers.png`` with the verdict distribution per procedure,
and ``witnesses.png`` with the exponent histogram of the yes answers.
The run is a pure function of (seed, cases), so two runs with the same
arguments produce identical rows.
"""

from __future__ import annotations

import csv
import os
import random
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .decide import brcp_fatf, brp_fatf, tcp_fatf
from .elements import FatfElement, conjugate_in_fatf
from .endos import Endomorphism, apply
from .free_orbits import OracleConfig
from .intlinalg import IntMatrix
from .orbit import OrbitNo, OrbitUnknown, OrbitYes, solve_linear_orbit

_ITERATION_HORIZON = 50
_LETTER_CAP = 4000
_CONFIG = OracleConfig(max_steps=400, max_word_len=256, grid=48)

_FIELDS = ("procedure", "instance", "answer", "witness_k", "agrees")


def run_report(out_dir: str, seed: int, cases: int) -> dict:
    """Run every family, write the artifacts, and summarize."""
    os.makedirs(out_dir, exist_ok=True)
    rows: list[dict] = []
    rows.extend(_reach_family(seed, cases))
    rows.extend(_orbit_family(seed, cases))
    rows.extend(_twisted_family(seed, cases))

    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_FIELDS)
        writer.writeheader()
        writer.writerows(rows)

    figures = [_answer_figure(rows, out_dir), _witness_figure(rows, out_dir)]
    disagreements = sum(1 for row in rows if row["agrees"] == "no")
    return {
        "csv": csv_path,
        "figures": figures,
        "rows": len(rows),
        "disagreements": disagreements,
    }


def _first_hit(endo: Endomorphism, g: FatfElement, h: FatfElement,
               conjugacy: bool) -> Optional[int]:
    """Ground truth by direct iteration, None past the horizon."""
    value = g
    for k in range(_ITERATION_HORIZON + 1):
        if len(value.word) > _LETTER_CAP:
            return None
        if conjugacy:
            if conjugate_in_fatf(value, h) is not None:
                return k
        elif value == h:
            return k
        value = apply(endo, value)
    return None


def _reach_family(seed: int, cases: int) -> list[dict]:
    from .sampling import random_instance

    rows = []
    rng = random.Random(seed)
    for index in range(cases):
        conjugacy = index % 2 == 1
        endo, g, h, planted = random_instance(rng)
        decide = brcp_fatf if conjugacy else brp_fatf
        answer = decide(endo, g, h, _CONFIG)
        truth = _first_hit(endo, g, h, conjugacy)
        if answer.is_yes:
            agrees = "yes" if _check_hit(endo, g, h, int(answer.witness),
                                         conjugacy) else "no"
        elif answer.is_no:
            agrees = "yes" if truth is None else "no"
        else:
            agrees = "n/a"
        rows.append({
            "procedure": "brcp" if conjugacy else "brp",
            "instance": index,
            "answer": answer.answer,
            "witness_k": answer.witness if answer.is_yes else "",
            "agrees": agrees,
        })
    return rows


def _check_hit(endo: Endomorphism, g: FatfElement, h: FatfElement, k: int,
               conjugacy: bool) -> bool:
    value = g
    for _ in range(k):
        if len(value.word) > _LETTER_CAP * 8:
            return True
        value = apply(endo, value)
    if conjugacy:
        return conjugate_in_fatf(value, h) is not None
    return value == h


def _orbit_family(seed: int, cases: int) -> list[dict]:
    rows = []
    rng = random.Random(seed + 1)
    for index in range(cases):
        dim = rng.randint(1, 3)
        matrix = IntMatrix.from_rows(
            [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)],
            dim)
        x = tuple(rng.randint(-3, 3) for _ in range(dim))
        if rng.random() < 0.5:
            steps = rng.randrange(12)
            y = x
            for _ in range(steps):
                y = matrix.act(y)
        else:
            y = tuple(rng.randint(-3, 3) for _ in range(dim))
        answer = solve_linear_orbit(x, matrix, y, max_steps=400)
        truth = _brute_orbit(x, matrix, y)
        if isinstance(answer, OrbitYes):
            agrees = "yes" if _power_hits(x, matrix, y, answer.k) else "no"
        elif isinstance(answer, OrbitNo):
            agrees = "yes" if truth is None else "no"
        else:
            agrees = "n/a"
        rows.append({
            "procedure": "orbit",
            "instance": index,
            "answer": {OrbitYes: "yes", OrbitNo: "no",
                       OrbitUnknown: "unknown"}[type(answer)],
            "witness_k": answer.k if isinstance(answer, OrbitYes) else "",
            "agrees": agrees,
        })
    return rows


def _brute_orbit(x, matrix, y, horizon: int = 200) -> Optional[int]:
    value = x
    for k in range(horizon + 1):
        if value == y:
            return k
        value = matrix.act(value)
        if max((abs(c) for c in value), default=0) > 10 ** 9:
            return None
    return None


def _power_hits(x, matrix, y, k: int) -> bool:
    value = x
    for _ in range(k):
        value = matrix.act(value)
    return tuple(value) == tuple(y)


def _twisted_family(seed: int, cases: int) -> list[dict]:
    from .sampling import random_twisted_instance

    rows = []
    rng = random.Random(seed + 2)
    for index in range(cases):
        endo, g, h, z = random_twisted_instance(rng)
        answer = tcp_fatf(endo, g, h, _CONFIG)
        if answer.is_yes:
            witness = answer.witness
            holds = apply(endo, witness).inverse() * g * witness == h
            agrees = "yes" if holds else "no"
        elif answer.is_no:
            agrees = "no" if z is not None else "yes"
        else:
            agrees = "n/a"
        rows.append({
            "procedure": "tcp",
            "instance": index,
            "answer": answer.answer,
            "witness_k": "",
            "agrees": agrees,
        })
    return rows


def _answer_figure(rows: list[dict], out_dir: str) -> str:
    procedures = sorted({row["procedure"] for row in rows})
    answers = ("yes", "no", "unknown")
    counts = {name: [sum(1 for row in rows
                         if row["procedure"] == name
                         and row["answer"] == answer)
                     for answer in answers]
              for name in procedures}
    fig, ax = plt.subplots(figsize=(6, 4))
    bottoms = [0] * len(procedures)
    for level, answer in enumerate(answers):
        heights = [counts[name][level] for name in procedures]
        ax.bar(procedures, heights, bottom=bottoms, label=answer)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_ylabel("instances")
    ax.set_title("verdict distribution per procedure")
    ax.legend()
    path = os.path.join(out_dir, "answers.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def _witness_figure(rows: list[dict], out_dir: str) -> str:
    values = [int(row["witness_k"]) for row in rows
              if row["witness_k"] != ""]
    fig, ax = plt.subplots(figsize=(6, 4))
    if values:
        ax.hist(values, bins=range(0, max(values) + 2), edgecolor="black")
    ax.set_xlabel("witness exponent k")
    ax.set_ylabel("count")
    ax.set_title("yes-answer exponents")
    path = os.path.join(out_dir, "witnesses.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path

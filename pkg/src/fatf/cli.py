"""Command-line front end for the decision procedures.

Every subcommand prints one JSON document and exits 0 for yes, 1 for
no, 2 for unknown, and 3 for malformed input.  Output is deterministic
for fixed inputs and options: keys are sorted, dictionaries carry no
timestamps, and search bounds come from flags or environment defaults
(FATF_BOUND, FATF_MAXLEN, FATF_GRID), never from the machine.

With ``--verify`` the emitted witness is re-checked by direct
arithmetic (replaying applications, multiplying out conjugators) and
the document gains a ``verified`` field; certificates of the orbit
command are replayed the same way.
"""

from __future__ import annotations

import functools
import hashlib
import json
import os
from typing import Any, Callable, Optional

import click

from .decide import (
    brcp_fatf,
    brp_fatf,
    philog_conj_fatf,
    philog_fatf,
    tcp_fatf,
    tsbrcp_fatf,
)
from .elements import FatfElement, GroupSignature, conjugate_in_fatf
from .endos import (
    Endomorphism,
    NotAnEndomorphism,
    TypeIEndo,
    TypeIIEndo,
    apply,
    compose,
    is_bijective,
    is_injective,
    power,
)
from .free_orbits import EmptyLog, OracleConfig, Progression
from .hnn import HnnGroup, cp_hnn, hnn_conjugate, hnn_mul, image_membership, normalize, wp_hnn
from .intlinalg import AffineMap, IntMatrix, snf
from .orbit import (
    Congruence,
    Cycle,
    Escape,
    Growth,
    OrbitAnswer,
    OrbitNo,
    OrbitUnknown,
    OrbitYes,
    solve_affine_orbit,
    solve_linear_orbit,
    verify_affine_orbit,
    verify_linear_orbit,
)
from .parsing import (
    ParseError,
    endo_from_document,
    endo_to_document,
    format_element,
    format_hnn,
    format_word,
    parse_element,
    parse_hnn,
    parse_matrix,
    parse_vector,
)
from .subgroups import SubgroupGraph
from .verdict import Decision
from .words import Word

_TRACE_EMIT_CAP = 1000
_TRACE_HASH_CAP = 100000
_REPLAY_LETTER_CAP = 200000
_PREFIX_SCAN = 50


def _bound_default(flag: Optional[int], env: str, fallback: int) -> int:
    if flag is not None:
        return flag
    raw = os.environ.get(env)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"environment variable {env} must be an integer, "
                         f"got {raw!r}") from None


def _build_config(oracle: str, bound: Optional[int], maxlen: Optional[int],
                  grid: Optional[int]) -> OracleConfig:
    return OracleConfig(
        backend=oracle,
        max_steps=_bound_default(bound, "FATF_BOUND", 10000),
        max_word_len=_bound_default(maxlen, "FATF_MAXLEN", 64),
        grid=_bound_default(grid, "FATF_GRID", 512),
    )


def _oracle_options(fn):
    for option in (
        click.option("--oracle", type=click.Choice(["auto", "bounded",
                                                    "abelian"]),
                     default="auto", show_default=True,
                     help="free-orbit strategy selection"),
        click.option("--bound", type=int, default=None,
                     help="orbit step budget [env FATF_BOUND, default 10000]"),
        click.option("--maxlen", type=int, default=None,
                     help="word length ceiling [env FATF_MAXLEN, default 64]"),
        click.option("--grid", type=int, default=None,
                     help="two-sided search width [env FATF_GRID, "
                          "default 512]"),
        click.option("--verify", is_flag=True,
                     help="re-check the verdict by direct arithmetic"),
    ):
        fn = option(fn)
    return fn


def _signature_options(fn):
    for option in (
        click.option("--n", "n_flag", type=int, default=None,
                     help="expected free rank (cross-checked)"),
        click.option("--m", "m_flag", type=int, default=None,
                     help="expected abelian rank (cross-checked)"),
    ):
        fn = option(fn)
    return fn


def to_jsonable(value: Any) -> Any:
    """Flatten library values into JSON-friendly structures."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, IntMatrix):
        return [list(row) for row in value.rows]
    if isinstance(value, Word):
        return format_word(value)
    if isinstance(value, FatfElement):
        return format_element(value)
    if isinstance(value, (TypeIEndo, TypeIIEndo)):
        return endo_to_document(value)
    if isinstance(value, EmptyLog):
        return {"kind": "empty-log"}
    if isinstance(value, Progression):
        return {"kind": "progression", "first": value.start,
                "period": value.period}
    if isinstance(value, Cycle):
        return {"kind": "cycle", "entry": value.entry, "period": value.period}
    if isinstance(value, Growth):
        return {"kind": "growth", "threshold_step": value.threshold_step,
                "margin": value.margin}
    if isinstance(value, Congruence):
        return {"kind": "congruence", "modulus": value.modulus,
                "checked_prefix": value.checked_prefix}
    if isinstance(value, Escape):
        return {"kind": "escape", "checked_prefix": value.checked_prefix}
    if isinstance(value, AffineMap):
        return {"matrix": to_jsonable(value.matrix),
                "offset": list(value.offset)}
    from .hnn import HnnElement

    if isinstance(value, HnnElement):
        return format_hnn(value)
    return str(value)


def _emit(command: str, answer: str, witness: Any = None,
          certificate: Any = None, taint: Optional[str] = None,
          stats: Optional[dict] = None, verified: Any = "absent",
          error: Optional[str] = None) -> None:
    doc = {
        "schema": 1,
        "command": command,
        "answer": answer,
        "witness": to_jsonable(witness),
        "certificate": to_jsonable(certificate),
        "taint": taint,
        "stats": to_jsonable(stats or {}),
    }
    if verified != "absent":
        doc["verified"] = verified
    if error is not None:
        doc["error"] = error
    click.echo(json.dumps(doc, sort_keys=True, indent=2))
    raise SystemExit({"yes": 0, "no": 1, "unknown": 2, "error": 3}[answer])


def _guarded(command: str) -> Callable:
    def decorate(fn: Callable) -> Callable:
        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return fn(*args, **kwargs)
            except SystemExit:
                raise
            except (ValueError, OSError) as err:
                _emit(command, "error", error=str(err))
        return wrapper
    return decorate


def _load_endo(path: str, n_flag: Optional[int],
               m_flag: Optional[int]) -> Endomorphism:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as err:
            raise ParseError(f"{path}: not valid JSON ({err})") from None
    endo = endo_from_document(doc)
    signature = endo.signature
    if n_flag is not None and signature.free_rank != n_flag:
        raise ParseError(f"free rank is {signature.free_rank}, "
                         f"--n expected {n_flag}")
    if m_flag is not None and signature.abelian_rank != m_flag:
        raise ParseError(f"abelian rank is {signature.abelian_rank}, "
                         f"--m expected {m_flag}")
    return endo


def _stats(endo: Optional[Endomorphism] = None,
           config: Optional[OracleConfig] = None, **extra: Any) -> dict:
    stats: dict = {}
    if endo is not None:
        signature = endo.signature
        stats["n"] = signature.free_rank
        stats["m"] = signature.abelian_rank
    if config is not None:
        stats["backend"] = config.backend
        stats["max_steps"] = config.max_steps
        stats["max_word_len"] = config.max_word_len
        stats["grid"] = config.grid
    stats.update(extra)
    return stats


def _replay(endo: Endomorphism, g: FatfElement,
            steps: int) -> Optional[FatfElement]:
    """Apply the map ``steps`` times, None when words outgrow the budget."""
    value = g
    for _ in range(steps):
        if len(value.word) > _REPLAY_LETTER_CAP:
            return None
        value = apply(endo, value)
    if len(value.word) > _REPLAY_LETTER_CAP:
        return None
    return value


def _emit_decision(command: str, decision: Decision, stats: dict,
                   verify: bool,
                   check_witness: Optional[Callable[[Any], Optional[bool]]],
                   ) -> None:
    verified: Any = "absent"
    if verify:
        if decision.is_yes and check_witness is not None:
            verified = check_witness(decision.witness)
        else:
            verified = None
    _emit(command, decision.answer, witness=decision.witness,
          certificate=decision.certificate, taint=decision.taint,
          stats=stats, verified=verified)


@click.group()
@click.version_option(package_name="fatf")
def main() -> None:
    """Decision procedures for free-abelian-times-free groups.

    Elements read as `x1*x2^-1 t^(2,-3)` (bare words mean zero abelian
    part), extension elements as `x^2 x1*x2 t^(1) x^-1`, and
    endomorphisms come from JSON files with fields type/n/m plus the
    type's data (see the project README for the exact shapes).
    """


@main.command()
@click.argument("endo_file", type=click.Path())
@_signature_options
@_guarded("classify")
def classify(endo_file: str, n_flag: Optional[int],
             m_flag: Optional[int]) -> None:
    """Recognize the endomorphism type of a JSON document."""
    try:
        endo = _load_endo(endo_file, n_flag, m_flag)
    except NotAnEndomorphism as err:
        _emit("classify", "no", certificate=str(err), stats={})
    kind = "I" if isinstance(endo, TypeIEndo) else "II"
    _emit("classify", "yes", witness=endo_to_document(endo),
          stats=_stats(endo, kind=kind))


@main.command("apply")
@click.argument("endo_file", type=click.Path())
@click.argument("element")
@_signature_options
@click.option("--verify", is_flag=True, help="re-check by reparsing the image")
@_guarded("apply")
def apply_command(endo_file: str, element: str, n_flag: Optional[int],
                  m_flag: Optional[int], verify: bool) -> None:
    """Apply the endomorphism to one element."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    g = parse_element(element, endo.signature)
    image = apply(endo, g)
    verified: Any = "absent"
    if verify:
        verified = (parse_element(format_element(image), endo.signature)
                    == apply(endo, g))
    _emit("apply", "yes", witness=image, stats=_stats(endo),
          verified=verified)


@main.command("compose")
@click.argument("endo_file", type=click.Path())
@click.argument("endo_file2", type=click.Path())
@_signature_options
@click.option("--verify", is_flag=True,
              help="re-check on a seeded element sample")
@_guarded("compose")
def compose_command(endo_file: str, endo_file2: str, n_flag: Optional[int],
            m_flag: Optional[int], verify: bool) -> None:
    """Compose two endomorphisms (first applied first)."""
    first = _load_endo(endo_file, n_flag, m_flag)
    second = _load_endo(endo_file2, n_flag, m_flag)
    composite = compose(first, second)
    verified: Any = "absent"
    if verify:
        verified = _sample_agreement(
            composite.signature,
            lambda g: apply(composite, g),
            lambda g: apply(second, apply(first, g)))
    _emit("compose", "yes", witness=endo_to_document(composite),
          stats=_stats(composite), verified=verified)


@main.command("power")
@click.argument("endo_file", type=click.Path())
@click.argument("k", type=int)
@_signature_options
@click.option("--verify", is_flag=True,
              help="re-check against k-fold application on a seeded sample")
@_guarded("power")
def power_command(endo_file: str, k: int, n_flag: Optional[int],
                  m_flag: Optional[int], verify: bool) -> None:
    """Closed-form k-th power of an endomorphism."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    powered = power(endo, k)
    verified: Any = "absent"
    if verify:
        verified = _sample_agreement(
            endo.signature,
            lambda g: apply(powered, g),
            lambda g: _replay(endo, g, k))
    _emit("power", "yes", witness=endo_to_document(powered),
          stats=_stats(endo, k=k), verified=verified)


def _sample_agreement(signature: GroupSignature,
                      left: Callable[[FatfElement], Optional[FatfElement]],
                      right: Callable[[FatfElement], Optional[FatfElement]],
                      ) -> bool:
    import random

    from .words import enumerate_words

    rng = random.Random(20240)
    sample: list[FatfElement] = [signature.identity()]
    for word in enumerate_words(signature.free_rank, 2):
        abelian = tuple(rng.randint(-3, 3)
                        for _ in range(signature.abelian_rank))
        sample.append(FatfElement(word, abelian))
        if len(sample) >= 20:
            break
    for g in sample:
        lhs, rhs = left(g), right(g)
        if rhs is None:
            continue
        if lhs != rhs:
            return False
    return True


@main.command()
@click.argument("endo_file", type=click.Path())
@_signature_options
@_guarded("injective")
def injective(endo_file: str, n_flag: Optional[int],
              m_flag: Optional[int]) -> None:
    """Decide injectivity; the certificate carries the criterion data."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    if isinstance(endo, TypeIIEndo):
        _emit("injective", "no",
              certificate="type II maps are never injective",
              stats=_stats(endo))
        return
    graph = SubgroupGraph(len(endo.images), endo.images)
    certificate = {
        "type": "I",
        "det_q": endo.q.det(),
        "image_rank": graph.subgroup_rank(),
        "free_rank": len(endo.images),
        "bijective": is_bijective(endo),
    }
    answer = "yes" if is_injective(endo) else "no"
    _emit("injective", answer, certificate=certificate, stats=_stats(endo))


def _reach_command(command: str, conjugacy: bool, endo_file: str, g_text: str,
                   h_text: str, n_flag: Optional[int], m_flag: Optional[int],
                   oracle: str, bound: Optional[int], maxlen: Optional[int],
                   grid: Optional[int], verify: bool) -> None:
    endo = _load_endo(endo_file, n_flag, m_flag)
    config = _build_config(oracle, bound, maxlen, grid)
    g = parse_element(g_text, endo.signature)
    h = parse_element(h_text, endo.signature)
    decide = brcp_fatf if conjugacy else brp_fatf
    decision = decide(endo, g, h, config)

    def check(k: Any) -> Optional[bool]:
        replayed = _replay(endo, g, int(k))
        if replayed is None:
            return None
        if conjugacy:
            return conjugate_in_fatf(replayed, h) is not None
        return replayed == h

    _emit_decision(command, decision, _stats(endo, config), verify, check)


@main.command()
@click.argument("endo_file", type=click.Path())
@click.argument("g")
@click.argument("h")
@_signature_options
@_oracle_options
@_guarded("brp")
def brp(endo_file: str, g: str, h: str, n_flag: Optional[int],
        m_flag: Optional[int], oracle: str, bound: Optional[int],
        maxlen: Optional[int], grid: Optional[int], verify: bool) -> None:
    """Does some iterate of g under the map equal h?"""
    _reach_command("brp", False, endo_file, g, h, n_flag, m_flag,
                   oracle, bound, maxlen, grid, verify)


@main.command()
@click.argument("endo_file", type=click.Path())
@click.argument("g")
@click.argument("h")
@_signature_options
@_oracle_options
@_guarded("brcp")
def brcp(endo_file: str, g: str, h: str, n_flag: Optional[int],
         m_flag: Optional[int], oracle: str, bound: Optional[int],
         maxlen: Optional[int], grid: Optional[int], verify: bool) -> None:
    """Is some iterate of g under the map conjugate to h?"""
    _reach_command("brcp", True, endo_file, g, h, n_flag, m_flag,
                   oracle, bound, maxlen, grid, verify)


@main.command()
@click.argument("endo_file", type=click.Path())
@click.argument("g")
@click.argument("h")
@_signature_options
@_oracle_options
@click.option("--conjugacy", is_flag=True,
              help="collect iterates conjugate to the target instead of "
                   "equal to it")
@_guarded("philog")
def philog(endo_file: str, g: str, h: str, n_flag: Optional[int],
           m_flag: Optional[int], oracle: str, bound: Optional[int],
           maxlen: Optional[int], grid: Optional[int], verify: bool,
           conjugacy: bool) -> None:
    """The set of exponents k with g mapped k times hitting h."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    config = _build_config(oracle, bound, maxlen, grid)
    g_el = parse_element(g, endo.signature)
    h_el = parse_element(h, endo.signature)
    compute = philog_conj_fatf if conjugacy else philog_fatf
    log, taint = compute(endo, g_el, h_el, config)
    stats = _stats(endo, config, conjugacy=conjugacy)
    verified: Any = "absent"
    if verify:
        verified = None if log is None else _check_log_prefix(
            endo, g_el, h_el, log, conjugacy)
    if log is None:
        _emit("philog", "unknown", taint=taint, stats=stats,
              verified=verified)
    elif isinstance(log, EmptyLog):
        _emit("philog", "no", certificate=log, stats=stats,
              verified=verified)
    else:
        _emit("philog", "yes", witness=log, stats=stats, verified=verified)


def _check_log_prefix(endo: Endomorphism, g: FatfElement, h: FatfElement,
                      log: Any, conjugacy: bool) -> Optional[bool]:
    value = g
    for k in range(_PREFIX_SCAN + 1):
        if len(value.word) > _REPLAY_LETTER_CAP:
            return None
        if conjugacy:
            hit = conjugate_in_fatf(value, h) is not None
        else:
            hit = value == h
        if hit != (k in log):
            return False
        value = apply(endo, value)
    return True


@main.command()
@click.argument("endo_file", type=click.Path())
@click.argument("g")
@click.argument("h")
@_signature_options
@_oracle_options
@_guarded("tcp")
def tcp(endo_file: str, g: str, h: str, n_flag: Optional[int],
        m_flag: Optional[int], oracle: str, bound: Optional[int],
        maxlen: Optional[int], grid: Optional[int], verify: bool) -> None:
    """Twisted conjugacy: find z with (z)Phi^-1 g z = h."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    config = _build_config(oracle, bound, maxlen, grid)
    g_el = parse_element(g, endo.signature)
    h_el = parse_element(h, endo.signature)
    decision = tcp_fatf(endo, g_el, h_el, config)

    def check(witness: Any) -> bool:
        z = witness if isinstance(witness, FatfElement) else parse_element(
            str(witness), endo.signature)
        return apply(endo, z).inverse() * g_el * z == h_el

    _emit_decision("tcp", decision, _stats(endo, config), verify, check)


@main.command()
@click.argument("endo_file", type=click.Path())
@click.argument("g")
@click.argument("h")
@_signature_options
@_oracle_options
@_guarded("tsbrcp")
def tsbrcp(endo_file: str, g: str, h: str, n_flag: Optional[int],
           m_flag: Optional[int], oracle: str, bound: Optional[int],
           maxlen: Optional[int], grid: Optional[int], verify: bool) -> None:
    """Find shifts r, s making the two iterate orbits conjugate."""
    endo = _load_endo(endo_file, n_flag, m_flag)
    config = _build_config(oracle, bound, maxlen, grid)
    g_el = parse_element(g, endo.signature)
    h_el = parse_element(h, endo.signature)
    decision = tsbrcp_fatf(endo, g_el, h_el, config)

    def check(witness: Any) -> Optional[bool]:
        r, s = witness
        left = _replay(endo, g_el, int(r))
        right = _replay(endo, h_el, int(s))
        if left is None or right is None:
            return None
        return conjugate_in_fatf(left, right) is not None

    _emit_decision("tsbrcp", decision, _stats(endo, config), verify, check)


@main.command()
@click.option("--M", "matrix_text", required=True,
              help="square integer matrix, row-major brackets")
@click.option("--x", "x_text", required=True, help="start vector, e.g. (1,0)")
@click.option("--y", "y_text", required=True, help="target vector")
@click.option("--b", "b_text", default=None,
              help="affine offset; omit for the linear problem")
@click.option("--kmin", type=int, default=0, show_default=True,
              help="least admissible exponent")
@click.option("--bound", type=int, default=None,
              help="step budget [env FATF_BOUND, default 10000]")
@click.option("--verify", is_flag=True,
              help="replay the answer against the instance")
@_guarded("orbit")
def orbit(matrix_text: str, x_text: str, y_text: str, b_text: Optional[str],
          kmin: int, bound: Optional[int], verify: bool) -> None:
    """Does x reach y under iterating the matrix (optionally affine)?"""
    matrix = parse_matrix(matrix_text)
    if not matrix.is_square():
        raise ParseError("--M must be square")
    x = parse_vector(x_text, matrix.n_rows)
    y = parse_vector(y_text, matrix.n_rows)
    max_steps = _bound_default(bound, "FATF_BOUND", 10000)
    stats = {"dimension": matrix.n_rows, "k_min": kmin,
             "max_steps": max_steps, "affine": b_text is not None}
    if b_text is None:
        answer = solve_linear_orbit(x, matrix, y, k_min=kmin,
                                    max_steps=max_steps)
        step = matrix.act
        verified = verify_linear_orbit(x, matrix, y, answer, kmin) \
            if verify else "absent"
    else:
        offset = parse_vector(b_text, matrix.n_rows)
        affine = AffineMap(matrix, offset)
        answer = solve_affine_orbit(x, affine, y, k_min=kmin,
                                    max_steps=max_steps)
        step = affine.apply
        verified = verify_affine_orbit(x, affine, y, answer, kmin) \
            if verify else "absent"
    _emit_orbit("orbit", answer, x, step, stats, verified)


def _emit_orbit(command: str, answer: OrbitAnswer, x: tuple[int, ...],
                step: Callable, stats: dict, verified: Any) -> None:
    if isinstance(answer, OrbitYes):
        trace = _orbit_trace(x, step, answer.k)
        _emit(command, "yes", witness=answer.k, certificate={"trace": trace},
              stats=stats, verified=verified)
    elif isinstance(answer, OrbitNo):
        cert = answer.certificate
        steps = {Cycle: lambda c: c.entry + c.period,
                 Growth: lambda c: c.threshold_step,
                 Congruence: lambda c: c.checked_prefix,
                 Escape: lambda c: c.checked_prefix}[type(cert)](cert)
        trace = _orbit_trace(x, step, steps)
        _emit(command, "no",
              certificate={"reason": to_jsonable(cert), "trace": trace},
              stats=stats, verified=verified)
    else:
        _emit(command, "unknown",
              taint=f"no decision within {answer.bound_used} steps",
              stats=stats, verified=verified)


def _orbit_trace(x: tuple[int, ...], step: Callable, count: int) -> dict:
    """States 0..count, truncated with a running hash past the cap."""
    total = count + 1
    emit: list[list[int]] = []
    digest = hashlib.sha256()
    value = tuple(x)
    for index in range(min(total, _TRACE_HASH_CAP)):
        if index < _TRACE_EMIT_CAP:
            emit.append(list(value))
        digest.update(repr(value).encode())
        if index + 1 < total:
            value = tuple(step(value))
    if total <= _TRACE_EMIT_CAP:
        return {"states": emit}
    trace: dict = {"prefix": emit, "total_states": total,
                   "sha256": digest.hexdigest()}
    if total > _TRACE_HASH_CAP:
        trace["hash_covers"] = _TRACE_HASH_CAP
    return trace


@main.command("snf")
@click.argument("matrix_text", metavar="MATRIX")
@click.option("--verify", is_flag=True, help="re-check U*A*V == D")
@_guarded("snf")
def snf_command(matrix_text: str, verify: bool) -> None:
    """Smith normal form D = U*A*V with unimodular U, V."""
    matrix = parse_matrix(matrix_text)
    d, u, v = snf(matrix)
    verified: Any = "absent"
    if verify:
        verified = (u * matrix * v == d
                    and abs(u.det()) == 1 and abs(v.det()) == 1)
    _emit("snf", "yes", witness={"d": d, "u": u, "v": v},
          stats={"shape": list(matrix.shape)}, verified=verified)


def _load_group(endo_file: str, n_flag: Optional[int], m_flag: Optional[int],
                config: OracleConfig) -> HnnGroup:
    endo = _load_endo(endo_file, n_flag, m_flag)
    return HnnGroup(endo, config)


@main.command("hnn-wp")
@click.argument("endo_file", type=click.Path())
@click.argument("element")
@_signature_options
@_oracle_options
@_guarded("hnn-wp")
def hnn_wp(endo_file: str, element: str, n_flag: Optional[int],
           m_flag: Optional[int], oracle: str, bound: Optional[int],
           maxlen: Optional[int], grid: Optional[int], verify: bool) -> None:
    """Is the extension element the identity?  Witness: its normal form."""
    config = _build_config(oracle, bound, maxlen, grid)
    group = _load_group(endo_file, n_flag, m_flag, config)
    raw = parse_hnn(element, group.signature)
    reduced = normalize(group, raw.i, raw.g, raw.j)
    verified: Any = "absent"
    if verify:
        verified = (reduced.i == 0 or reduced.j == 0
                    or image_membership(group, reduced.g) is None)
    answer = "yes" if wp_hnn(group, raw) else "no"
    _emit("hnn-wp", answer, witness=reduced,
          stats=_stats(group.endo, config), verified=verified)


@main.command("hnn-mul")
@click.argument("endo_file", type=click.Path())
@click.argument("element1")
@click.argument("element2")
@_signature_options
@_oracle_options
@_guarded("hnn-mul")
def hnn_mul_command(endo_file: str, element1: str, element2: str,
                    n_flag: Optional[int], m_flag: Optional[int], oracle: str,
                    bound: Optional[int], maxlen: Optional[int],
                    grid: Optional[int], verify: bool) -> None:
    """Multiply two extension elements into normal form."""
    config = _build_config(oracle, bound, maxlen, grid)
    group = _load_group(endo_file, n_flag, m_flag, config)
    e1 = parse_hnn(element1, group.signature)
    e2 = parse_hnn(element2, group.signature)
    product = hnn_mul(group, e1, e2)
    verified: Any = "absent"
    if verify:
        roundtrip = parse_hnn(format_hnn(product), group.signature)
        verified = (normalize(group, roundtrip.i, roundtrip.g, roundtrip.j)
                    == product
                    and product.exponent_sum
                    == e1.exponent_sum + e2.exponent_sum)
    _emit("hnn-mul", "yes", witness=product,
          stats=_stats(group.endo, config), verified=verified)


@main.command("hnn-cp")
@click.argument("endo_file", type=click.Path())
@click.argument("element1")
@click.argument("element2")
@_signature_options
@_oracle_options
@click.option("--depth", type=int, default=None,
              help="diagonal search depth for the twisted scan [default 8]")
@_guarded("hnn-cp")
def hnn_cp(endo_file: str, element1: str, element2: str,
           n_flag: Optional[int], m_flag: Optional[int], oracle: str,
           bound: Optional[int], maxlen: Optional[int], grid: Optional[int],
           verify: bool, depth: Optional[int]) -> None:
    """Conjugacy in the extension; yes answers carry a conjugator."""
    config = _build_config(oracle, bound, maxlen, grid)
    if depth is not None:
        import dataclasses

        config = dataclasses.replace(config, hnn_depth=depth)
    group = _load_group(endo_file, n_flag, m_flag, config)
    e1 = parse_hnn(element1, group.signature)
    e2 = parse_hnn(element2, group.signature)
    decision = cp_hnn(group, e1, e2, config)

    def check(witness: Any) -> bool:
        z = witness if not isinstance(witness, str) else parse_hnn(
            witness, group.signature)
        lhs = hnn_conjugate(group, normalize(group, e1.i, e1.g, e1.j), z)
        return lhs == normalize(group, e2.i, e2.g, e2.j)

    _emit_decision("hnn-cp", decision,
                   _stats(group.endo, config, depth=config.hnn_depth),
                   verify, check)


@main.command()
@click.option("--out", "out_dir", type=click.Path(), default="fatf-report",
              show_default=True, help="output directory")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--cases", type=int, default=60, show_default=True,
              help="instances per procedure family")
@_guarded("report")
def report(out_dir: str, seed: int, cases: int) -> None:
    """Run a seeded differential batch; write CSV rows and figures."""
    from .report import run_report

    summary = run_report(out_dir, seed, cases)
    answer = "yes" if summary["disagreements"] == 0 else "no"
    _emit("report", answer, witness=summary,
          stats={"seed": seed, "cases": cases})


if __name__ == "__main__":
    main()

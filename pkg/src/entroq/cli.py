"""Batch front end: ``entroq --scenario file.json --out dir [--jobs k]``.

A scenario is a flat JSON object.  Recognised keys::

    command     min-entropy | bias-check | encrypt-demo | indist-sweep |
                lower-bound | keylen-table | gl-demo          (required)
    seed        non-negative integer                         (required)
    n           message qubits (string length for bias-check)
    t           claimed entropy floor (default: measured per trial)
    epsilon     security target
    cipher      as | xu | pad
    m, delta    AGHP field degree, or target bias
    key_count   |K| for xu and lower-bound
    trials      number of independent trials
    output_path default output directory

Exit status: 0 if every record passes, 1 on failed records or runtime
errors, 2 if some trial violated its entropy precondition, 64 for a
malformed scenario.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import ciphers as C
from . import gf2
from . import harness as H
from . import linalg as la
from .minentropy import cond_min_entropy, cq_state, helstrom_guess_prob, min_entropy_unconditional
from .reports import emit_report, write_table

log = logging.getLogger("entroq")

COMMANDS = ("min-entropy", "bias-check", "encrypt-demo", "indist-sweep", "lower-bound", "keylen-table", "gl-demo")
CIPHERS = ("as", "xu", "pad")
EXIT_OK, EXIT_FAIL, EXIT_PRECONDITION, EXIT_USAGE = 0, 1, 2, 64


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    command: str
    seed: int
    n: int = 1
    t: float | None = None
    epsilon: float | None = None
    cipher: str = "pad"
    m: int | None = None
    delta: float | None = None
    key_count: int | None = None
    trials: int = 1
    output_path: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ScenarioError(f"field {unknown[0]!r}: unknown key")
        for req in ("command", "seed"):
            if req not in d:
                raise ScenarioError(f"field {req!r}: required")
        for k, v in d.items():
            if isinstance(v, (dict, list)):
                raise ScenarioError(f"field {k!r}: nested values are not allowed")
        sc = cls(**d)
        sc.validate()
        return sc

    @classmethod
    def load(cls, path) -> "Scenario":
        text = Path(path).read_text(encoding="utf-8")
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
        return cls.from_dict(d)

    def validate(self):
        def need(cond, field, msg):
            if not cond:
                raise ScenarioError(f"field {field!r}: {msg}")

        def is_int(v):
            return isinstance(v, int) and not isinstance(v, bool)

        def is_num(v):
            return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)

        need(self.command in COMMANDS, "command", f"must be one of {', '.join(COMMANDS)}")
        need(is_int(self.seed) and self.seed >= 0, "seed", "must be a non-negative integer")
        need(is_int(self.n), "n", "must be an integer")
        limit = 16 if self.command == "bias-check" else (12 if self.command == "gl-demo" else 4)
        need(1 <= self.n <= limit, "n", f"must be in [1, {limit}]")
        need(is_int(self.trials) and 1 <= self.trials <= 100_000, "trials", "must be an integer in [1, 100000]")
        need(self.cipher in CIPHERS, "cipher", f"must be one of {', '.join(CIPHERS)}")
        if self.t is not None:
            need(is_num(self.t) and -self.n <= self.t <= self.n, "t", f"must be a number in [-n, n] = [{-self.n}, {self.n}]")
        if self.epsilon is not None:
            need(is_num(self.epsilon) and 0 < self.epsilon <= 1, "epsilon", "must be in (0, 1]")
        if self.m is not None:
            need(is_int(self.m) and 1 <= self.m <= gf2.MAX_DEGREE, "m", f"must be an integer in [1, {gf2.MAX_DEGREE}]")
        if self.delta is not None:
            need(is_num(self.delta) and 0 < self.delta <= 1, "delta", "must be in (0, 1]")
        if self.key_count is not None:
            need(is_int(self.key_count) and 1 <= self.key_count <= 4 ** self.n, "key_count",
                 f"must be an integer in [1, 4^n = {4 ** self.n}]")
        if self.output_path is not None:
            need(isinstance(self.output_path, str) and self.output_path, "output_path", "must be a non-empty string")
        if self.command == "bias-check":
            need(self.m is not None or self.delta is not None, "m", "bias-check needs m or delta")
        if self.command == "indist-sweep" and self.cipher == "as":
            need(self.m is not None or self.delta is not None, "m", "the as cipher needs m or delta")


# ---------------------------------------------------------------- trials


def _rng_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


def _random_ae(n: int, s: int) -> la.DensityOperator:
    rng = np.random.default_rng(s)
    d = 2 ** n
    return la.random_state((d, d), int(rng.integers(1, d * d + 1)), rng.integers(2 ** 63), ("A", "E"))


def build_cipher(sc: Scenario) -> C.KeyedCipher:
    if sc.cipher == "pad":
        return C.make_full_pad(sc.n)
    if sc.cipher == "as":
        if sc.m is not None:
            return C.make_ambainis_smith_aghp(sc.n, sc.m)
        return C.make_ambainis_smith(sc.n, gf2.aghp_construct(2 * sc.n, sc.delta))
    return C.make_xor_universal(sc.n, key_count=sc.key_count)


def _trial_min_entropy(sc: Scenario, i: int, s: int) -> H.ExperimentReport:
    start = time.perf_counter()
    rng = np.random.default_rng(s)
    d = 2 ** sc.n
    if i % 2 == 0:
        ra = la.random_state((d,), int(rng.integers(1, d + 1)), rng.integers(2 ** 63), ("A",))
        re = la.random_state((d,), int(rng.integers(1, d + 1)), rng.integers(2 ** 63), ("E",))
        res = cond_min_entropy(la.tensor_product(ra, re))
        oracle, family = min_entropy_unconditional(ra), "product"
    else:
        p0 = float(rng.uniform(0.05, 0.95))
        r0 = la.random_state((d,), int(rng.integers(1, d + 1)), rng.integers(2 ** 63), ("E",))
        r1 = la.random_state((d,), int(rng.integers(1, d + 1)), rng.integers(2 ** 63), ("E",))
        res = cond_min_entropy(cq_state([p0, 1 - p0], [r0, r1]))
        oracle, family = -math.log2(helstrom_guess_prob(p0, 1 - p0, r0, r1)), "binary-cq"
    return H.ExperimentReport.judge(
        sc.command, i, s, res.value, math.nan, abs(res.value - oracle), 1e-5, time.perf_counter() - start,
        {"family": family, "oracle": oracle, "certificate_gap": res.certificate_gap},
    )


def _trial_encrypt_demo(sc: Scenario, i: int, s: int) -> H.ExperimentReport:
    start = time.perf_counter()
    c = build_cipher(sc)
    rho = _random_ae(sc.n, s)
    key = int(np.random.default_rng(s + 1).integers(c.key_count))
    back = c.decrypt(key, c.encrypt(key, rho))
    err = la.trace_distance(back, rho)
    return H.ExperimentReport.judge(sc.command, i, s, math.nan, math.nan, err, 0.0,
                                    time.perf_counter() - start, {"key": key, "cipher": c.to_json()})


def _trial_indist(sc: Scenario, i: int, s: int) -> H.ExperimentReport:
    c = build_cipher(sc)
    rho = _random_ae(sc.n, s)
    if sc.cipher == "as":
        return H.as_bound_check(c, rho, sc.t, scenario=sc.command, trial=i, seed=s)
    if sc.cipher == "xu":
        return H.xu_bound_check(c, rho, sc.t, sc.epsilon, scenario=sc.command, trial=i, seed=s)
    start = time.perf_counter()
    delta = H.indist_distance(c, rho)
    return H.ExperimentReport.judge(sc.command, i, s, math.nan, math.nan, delta, 0.0, time.perf_counter() - start)


def _trial_lower_bound(sc: Scenario, i: int, s: int) -> H.ExperimentReport:
    start = time.perf_counter()
    k = sc.key_count if sc.key_count is not None else 2
    c = C.random_pauli_subset(sc.n, k, s)
    eps = sc.epsilon if sc.epsilon is not None else 0.5
    r = H.lower_bound_experiment(c, eps)
    return H.ExperimentReport.judge(
        sc.command, i, s, -float(sc.n), eps, r.fidelity_sq, r.bound, time.perf_counter() - start,
        {"delta": r.delta, "indist_fails": r.indist_fails, "predicted_fail": r.predicted_fail,
         "keys": c.meta["keys"]},
    )


def _trial_gl(sc: Scenario, i: int, s: int) -> H.ExperimentReport:
    start = time.perf_counter()
    eps = sc.epsilon if sc.epsilon is not None else 0.3
    prior, f, real, ideal = H.synthetic_gl_instance(sc.n, 8, eps, s)
    fadv = H.function_advantage(prior, f, real, ideal)
    r, padv = H.gl_reduction(prior, f, real, ideal)
    # pass iff half the function advantage is achieved by some predicate
    return H.ExperimentReport.judge(sc.command, i, s, math.nan, eps, fadv / 2, padv,
                                    time.perf_counter() - start, {"r": r, "function_advantage": fadv})


TRIALS = {
    "min-entropy": _trial_min_entropy,
    "encrypt-demo": _trial_encrypt_demo,
    "indist-sweep": _trial_indist,
    "lower-bound": _trial_lower_bound,
    "gl-demo": _trial_gl,
}


def _run_trial(args):
    sc, i = args
    s = _rng_seed(sc.seed, i)
    return TRIALS[sc.command](sc, i, s)


def run_trials(sc: Scenario, jobs: int = 1) -> list[H.ExperimentReport]:
    work = [(sc, i) for i in range(sc.trials)]
    if jobs > 1 and sc.trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_trial, work))  # map keeps trial order
    return [_run_trial(w) for w in work]


def bias_check(sc: Scenario) -> list[H.ExperimentReport]:
    start = time.perf_counter()
    s = gf2.aghp_set(sc.n, sc.m) if sc.m is not None else gf2.aghp_construct(sc.n, sc.delta)
    bias = gf2.measure_bias(s.strings, sc.n)
    return [H.ExperimentReport.judge(sc.command, 0, sc.seed, math.nan, math.nan, bias, s.delta_bound,
                                     time.perf_counter() - start, {"m": s.m, "size": len(s)})]


KEYLEN_COLUMNS = ("n", "t", "epsilon", "as_bits", "xu_bits", "necessary_bits", "as_delta", "as_m", "as_actual_bits")


def keylen_rows(sc: Scenario) -> list[dict]:
    t_grid = [sc.t] if sc.t is not None else list(range(-sc.n, sc.n + 1))
    e_grid = [sc.epsilon] if sc.epsilon is not None else [0.5, 0.25, 0.125, 0.0625]
    return [r.to_dict() for r in H.key_length_table(sc.n, t_grid, e_grid)]


def run(sc: Scenario, out_dir=None, jobs: int = 1) -> int:
    out = Path(out_dir or sc.output_path or ".")
    if sc.command == "keylen-table":
        path = write_table(keylen_rows(sc), out / "keylen.csv", KEYLEN_COLUMNS)
        log.info("wrote %s", path)
        return EXIT_OK
    records = bias_check(sc) if sc.command == "bias-check" else run_trials(sc, jobs)
    nd, cs = emit_report(records, out)
    log.info("wrote %s and %s", nd, cs)
    for r in records:
        log.debug("%s", asdict(r))
    if any(r.status == "fail" for r in records):
        return EXIT_FAIL
    if any(r.status == "precondition-violated" for r in records):
        return EXIT_PRECONDITION
    return EXIT_OK


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("ENTROQ_LOG", "info").lower(), logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="entroq", description="Run an entropic-security scenario.")
    p.add_argument("--scenario", required=True, help="path to a flat JSON scenario file")
    p.add_argument("--out", help="output directory (overrides output_path)")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    args = p.parse_args(argv)
    _setup_logging()
    try:
        sc = Scenario.load(args.scenario)
    except (OSError, ScenarioError, TypeError) as e:
        print(f"entroq: {args.scenario}: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(sc, args.out, max(1, args.jobs))
    except Exception as e:  # noqa: BLE001 - report and map to exit status 1
        log.error("%s failed: %s", sc.command, e)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

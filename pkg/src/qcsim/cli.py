"""Command-line entry point: ``qcsim <command> [options]``.

Every command accepts ``--seed``, ``--shots`` and ``--json``. JSON output
is a single object with sorted keys and no timing data, so identical flags
give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import bell, cfft, grover, oracles, protocols, qec, shor
from .errors import AlgorithmFailure, QcsimError
from .gates import qft_circuit, run_circuit
from .numtheory import rsa_demo
from .rng import Rng
from .state import basis_state, equal_up_to_global_phase, random_state

SCHEMA = 1
EXIT_USAGE = 2
EXIT_FAILURE = 3


class UsageError(Exception):
    pass


def _clean(x, digits: int = 12):
    """Make results JSON-friendly and stable (round floats, drop -0.0)."""
    if isinstance(x, dict):
        return {str(k): _clean(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v, digits) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        v = round(float(x), digits)
        return 0.0 if v == 0 else v
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real, digits), _clean(x.imag, digits)]
    return x


def _bits(text: str, name: str) -> str:
    if not text or any(ch not in "01" for ch in text):
        raise UsageError(f"--{name} must be a non-empty bit string")
    return text


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} must be comma-separated integers") from None


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(v.strip().replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError("--values must be comma-separated numbers like 1, 0.5, 1+2j") from None


# command handlers: each returns (params, result, stats)


def cmd_deutsch(args, rng):
    f = _bits(args.f, "f")
    if len(f) != 2:
        raise UsageError("--f is the truth table f(0)f(1), e.g. 01")
    spec = oracles.OracleSpec(1, 1, [int(ch) for ch in f])
    res = oracles.deutsch(spec, rng)
    return {"f": f}, {"classification": res.answer}, {"oracle_calls": res.oracle_calls}


def cmd_dj(args, rng):
    f = _bits(args.f, "f")
    n = len(f).bit_length() - 1
    if len(f) != 1 << n or n < 1:
        raise UsageError("--f must list 2**n output bits")
    spec = oracles.OracleSpec(n, 1, [int(ch) for ch in f])
    res = oracles.deutsch_jozsa(spec, rng)
    return ({"f": f, "n": n},
            {"classification": res.answer, "y": format(res.samples[0], f"0{n}b")},
            {"oracle_calls": res.oracle_calls})


def cmd_bv(args, rng):
    a = _bits(args.a, "a")
    n = len(a)
    res = oracles.bernstein_vazirani(oracles.bv_spec(int(a, 2), n), rng)
    found = format(res.answer, f"0{n}b")
    return {"a": a, "n": n}, {"recovered": found, "correct": found == a}, {"oracle_calls": res.oracle_calls}


def cmd_simon(args, rng):
    if args.a is not None:
        if args.n is None:
            raise UsageError("--a needs --n")
        spec = oracles.simon_spec_from_period(args.a, args.n, rng)
        params = {"n": args.n, "a": args.a}
    else:
        table = _int_list(args.table, "table")
        n = len(table).bit_length() - 1
        if len(table) != 1 << n:
            raise UsageError("--table must have 2**n entries")
        n_out = max(1, max(table).bit_length())
        spec = oracles.OracleSpec(n, n_out, table)
        params = {"table": table, "n": n}
    res = oracles.simon(spec, rng)
    return params, {"a": res.answer, "samples": list(res.samples)}, {"oracle_calls": res.oracle_calls}


def _distribution_rows(probs: np.ndarray, top: int | None):
    order = np.argsort(-probs, kind="stable")
    if top:
        order = order[:top]
    return [[int(y), float(probs[y])] for y in order]


def cmd_shor(args, rng):
    N = args.N
    params = {"N": N, "a": args.a, "path": args.path}
    if args.distribution:
        if args.a is None:
            raise UsageError("--distribution needs --a")
        inst = shor.PeriodInstance(N, args.a)
        dist = shor.y_distribution(inst)
        rows = _distribution_rows(dist.probs, args.top)
        params["top"] = args.top
        result = {"r": dist.r, "n": inst.n, "Q": dist.Q, "rows": rows}
        return params, result, {"total_probability": float(dist.probs.sum()),
                                "listed_probability": float(sum(p for _, p in rows))}
    runs = []
    for _ in range(args.shots):
        fr = shor.factor(N, rng, a=args.a, path=args.path)
        runs.append({"factors": list(fr.factors), "a": fr.a, "r": fr.r,
                     "attempts": fr.attempts, "samples": fr.samples, "lucky": fr.lucky})
    result = dict(runs[0]) if args.shots == 1 else {"runs": runs}
    stats = {"quantum_samples": sum(r["samples"] for r in runs), "runs": len(runs)}
    return params, result, stats


def cmd_grover(args, rng):
    n = args.n
    marked = _int_list(args.marked, "marked")
    params = {"n": n, "marked": marked, "iterations": args.iterations}
    m = grover.default_iterations(n, len(set(marked))) if args.iterations is None else args.iterations
    if args.distribution:
        s = grover.grover_state(n, marked, m)
        probs = np.abs(s.amplitudes) ** 2
        rows = _distribution_rows(probs, args.top)
        return params, {"iterations": m, "rows": rows}, {"total_probability": float(probs.sum())}
    hits = []
    for _ in range(args.shots):
        res = grover.grover_search(n, marked, rng, m)
        hits.append(res.index)
    found = sum(h in set(marked) for h in hits)
    result = {"iterations": m, "outcomes": hits,
              "success_probability": grover.success_probability(n, len(set(marked)), m)}
    return params, result, {"found": found, "shots": args.shots}


def cmd_qec(args, rng):
    c = qec.code(args.code)
    error = args.error
    params = {"code": c.name, "error": error}
    if args.theta is None:
        logical = random_state(1, rng)
    else:
        logical = bell.bloch_state(bell.Direction(args.theta, args.phi), 0)
        params.update(theta=args.theta, phi=args.phi)
    results = []
    for _ in range(args.shots):
        if error.lower().startswith("reset"):
            q = int(error[5:].lstrip(":") or 1)
            cyc = qec.correction_cycle(c, logical, qec.RESET, rng, qubit=q - 1)
        else:
            cyc = qec.correction_cycle(c, logical, error, rng)
        results.append({"syndrome": qec.format_signs(cyc.signs), "identified": cyc.identified.label,
                        "corrected": cyc.success})
    result = dict(results[0]) if args.shots == 1 else {"runs": results}
    stats = {"corrected": sum(r["corrected"] for r in results), "shots": args.shots,
             "stabilizers": [s.label for s in c.stabilizers]}
    return params, result, stats


def cmd_bell(args, rng):
    theta = args.theta
    rep = bell.bell_inequality_check(theta)
    a, c, b = (bell.Direction.in_plane(k * theta) for k in (0, 1, 2))
    pab = bell.correlation_run(a, b, args.trials, rng).frequency(1, 1)
    pac = bell.correlation_run(a, c, args.trials, rng).frequency(1, 1)
    pcb = bell.correlation_run(c, b, args.trials, rng).frequency(1, 1)
    result = {
        "lhs": rep.lhs, "rhs": rep.rhs, "violated": rep.violated,
        "lhs_sin": rep.lhs_sin, "rhs_sin": rep.rhs_sin,
        "empirical": {"P(+a;+b)": pab, "P(+a;+c)": pac, "P(+c;+b)": pcb,
                      "lhs": 2 * pab, "rhs": 2 * (pac + pcb), "violated": pab > pac + pcb},
    }
    return {"theta": theta, "trials": args.trials}, result, {"trials_per_pair": args.trials}


def cmd_qkd(args, rng):
    run = protocols.bb84 if args.protocol == "bb84" else protocols.b92
    t = run(args.photons, args.eve, rng)
    if args.transcript:
        text = t.to_jsonl() if args.transcript_format == "jsonl" else t.to_lines()
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(text)
    params = {"protocol": args.protocol, "photons": args.photons, "eve": args.eve}
    summary = t.summary()
    preview = min(t.key_length, 32)
    result = {"disagreement_rate": summary["disagreement_rate"],
              "key_length": summary["key_length"],
              "key_alice_prefix": "".join(map(str, t.sifted_key_alice[:preview])),
              "key_bob_prefix": "".join(map(str, t.sifted_key_bob[:preview]))}
    return params, result, {"sifted_fraction": summary["sifted_fraction"],
                            "disagreements": summary["disagreements"]}


def cmd_teleport(args, rng):
    psi = bell.bloch_state(bell.Direction(args.theta, args.phi), 0)
    counts = {f"{x}{y}": 0 for x in (0, 1) for y in (0, 1)}
    ok = 0
    last = None
    for _ in range(args.shots):
        last = protocols.teleport(psi, rng)
        counts[f"{last.x}{last.y}"] += 1
        ok += equal_up_to_global_phase(last.bob_state, psi)
    result = {"x": last.x, "y": last.y,
              "bob_state": [complex(v) for v in last.bob_state.amplitudes],
              "fidelity_ok": ok == args.shots}
    return {"theta": args.theta, "phi": args.phi}, result, {"outcome_counts": counts, "shots": args.shots}


def cmd_fft(args, rng):
    values = _complex_list(args.values)
    if not values:
        raise UsageError("--values is empty")
    x = cfft.pad_to_power_of_two(values)
    if args.inverse:
        y = cfft.inverse_dft(x) if args.direct else cfft.inverse_fft(x)
    else:
        y = cfft.dft_direct(x) if args.direct else cfft.fft(x)
    return ({"values": [complex(v) for v in values], "inverse": args.inverse, "direct": args.direct},
            {"output": [complex(v) for v in y]}, {"length": int(x.size), "padded": int(x.size) != len(values)})


def cmd_rsa(args, rng):
    out = rsa_demo(args.p, args.q, args.c, args.message)
    return {"p": args.p, "q": args.q, "c": args.c, "message": args.message}, out, {"N": args.p * args.q}


def cmd_qft(args, rng):
    n = args.n
    if not 0 <= args.x < 1 << n:
        raise UsageError(f"--x must lie in [0, {1 << n})")
    c = qft_circuit(n, include_swaps=not args.no_swaps, d_max=args.d_max)
    out = run_circuit(c, basis_state(n, args.x))
    return ({"n": n, "x": args.x, "swaps": not args.no_swaps, "d_max": args.d_max},
            {"amplitudes": [complex(v) for v in out.amplitudes]},
            {"gates": len(c), "controlled_phase_gates": c.count("CR")})


HANDLERS = {
    "deutsch": cmd_deutsch, "dj": cmd_dj, "bv": cmd_bv, "simon": cmd_simon, "shor": cmd_shor,
    "grover": cmd_grover, "qec": cmd_qec, "bell": cmd_bell, "qkd": cmd_qkd,
    "teleport": cmd_teleport, "fft": cmd_fft, "rsa": cmd_rsa, "qft": cmd_qft,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--shots", type=int, default=1, help="repetitions (default 1)")
    common.add_argument("--json", action="store_true", help="emit one JSON object")

    p = argparse.ArgumentParser(prog="qcsim", description="Seeded quantum-algorithm simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("deutsch", parents=[common], help="Deutsch's one-query test")
    s.add_argument("--f", default="01", help="truth table f(0)f(1)")

    s = sub.add_parser("dj", parents=[common], help="Deutsch-Jozsa")
    s.add_argument("--f", default="0011", help="truth table of 2**n bits")

    s = sub.add_parser("bv", parents=[common], help="Bernstein-Vazirani")
    s.add_argument("--a", default="11010", help="hidden bit string")

    s = sub.add_parser("simon", parents=[common], help="Simon's period finding")
    s.add_argument("--table", default="3,2,2,3,0,1,1,0", help="f(0),f(1),... as integers")
    s.add_argument("--a", type=int, help="generate a random function with this period")
    s.add_argument("--n", type=int, help="input bits when using --a")

    s = sub.add_parser("shor", parents=[common], help="factor N or show the y distribution")
    s.add_argument("--N", type=int, default=15)
    s.add_argument("--a", type=int)
    s.add_argument("--path", choices=["auto", "full", "structured", "analytic"], default="auto")
    s.add_argument("--distribution", action="store_true", help="print P(y) instead of factoring")
    s.add_argument("--top", type=int, default=None, help="keep only the K most likely rows")

    s = sub.add_parser("grover", parents=[common], help="Grover search")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--marked", default="3", help="comma-separated marked indices")
    s.add_argument("--iterations", type=int)
    s.add_argument("--distribution", action="store_true")
    s.add_argument("--top", type=int, default=None)

    s = sub.add_parser("qec", parents=[common], help="one error-correction cycle")
    s.add_argument("--code", default="shor9", choices=[c.lower() for c in qec.CODE_NAMES])
    s.add_argument("--error", default="X1", help="Pauli label like Y4, or reset:Q")
    s.add_argument("--theta", type=float, help="logical state polar angle (random if omitted)")
    s.add_argument("--phi", type=float, default=0.0)

    s = sub.add_parser("bell", parents=[common], help="Bell inequality test")
    s.add_argument("--theta", type=float, default=math.pi / 3)
    s.add_argument("--trials", type=int, default=100000)

    s = sub.add_parser("qkd", parents=[common], help="BB84 or B92 key distribution")
    s.add_argument("--protocol", choices=["bb84", "b92"], default="bb84")
    s.add_argument("--photons", type=int, default=1000)
    s.add_argument("--eve", action="store_true", help="add an intercept-resend eavesdropper")
    s.add_argument("--transcript", help="write per-photon records to this file")
    s.add_argument("--transcript-format", choices=["csv", "jsonl"], default="csv")

    s = sub.add_parser("teleport", parents=[common], help="teleport a Bloch-sphere state")
    s.add_argument("--theta", type=float, default=math.pi / 3)
    s.add_argument("--phi", type=float, default=0.5)

    s = sub.add_parser("fft", parents=[common], help="symmetric-normalized Fourier transform")
    s.add_argument("--values", default="1,0,0,0")
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--direct", action="store_true", help="use the O(N^2) definition")

    s = sub.add_parser("rsa", parents=[common], help="RSA round trip")
    s.add_argument("--p", type=int, default=7)
    s.add_argument("--q", type=int, default=13)
    s.add_argument("--c", type=int, default=11)
    s.add_argument("--message", type=int, default=51)

    s = sub.add_parser("qft", parents=[common], help="QFT of a basis state")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--x", type=int, default=1)
    s.add_argument("--no-swaps", action="store_true")
    s.add_argument("--d-max", type=int)
    return p


def _render_text(command, params, result, stats) -> str:
    lines = [f"{command}: " + ", ".join(f"{k}={v}" for k, v in params.items() if v is not None)]
    for key, value in result.items():
        if key == "rows":
            lines.append(f"{'y':>8}  probability")
            lines.extend(f"{y:>8}  {p:.6f}" for y, p in value)
        else:
            lines.append(f"{key}: {value}")
    for key, value in stats.items():
        lines.append(f"[{key}] {value}")
    return "\n".join(lines)


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if args.shots < 1:
        print("error: --shots must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    rng = Rng(args.seed)
    try:
        params, result, stats = HANDLERS[args.command](args, rng)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AlgorithmFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (QcsimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        doc = {"schema": SCHEMA, "command": args.command, "seed": args.seed, "shots": args.shots,
               "params": params, "result": result, "stats": stats}
        print(json.dumps(_clean(doc), sort_keys=True))
    else:
        print(_render_text(args.command, _clean(params), _clean(result), _clean(stats)))
    return 0


def main() -> None:
    sys.exit(dispatch())

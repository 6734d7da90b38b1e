"""Command-line front end.

Subcommands: ``solve`` runs the whole pipeline on a problem file,
``moulds`` dumps the word table for an alphabet, ``verify`` runs the
identity suites, ``oracle`` diffs the mould normal form against the
recursive construction.  All output is JSON with scalars in the exact
literal grammar; exit codes are 0 (clean), 1 (an invariant is violated),
2 (bad input).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .birkhoff import (
    BirkhoffEngine,
    verify_conjugation_symmetry,
    verify_factorization,
    verify_grading_identities,
    verify_mould_equation,
    verify_support,
)
from .moulds import Alphabet
from .operators import (
    PerturbationProblem,
    compare_with_oracle,
    random_problem,
    solve,
    spectral_decompose,
)
from .scalars import ScalarParseError, format_scalar, parse_scalar

OUTPUT_DIR_ENV = "MOULDPERT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _note(args, message: str) -> None:
    if getattr(args, "verbose", False):
        print(message, file=sys.stderr)


def _load_problem(path: str) -> PerturbationProblem:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return PerturbationProblem.from_json_dict(data)
    except (KeyError, ValueError, ScalarParseError) as exc:
        raise InputError(f"bad problem file {path}: {exc}") from exc


def _parse_mu_list(text: str) -> list:
    samples = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        value = parse_scalar(part)
        if not value.is_real:
            raise InputError(f"mu sample {part!r} is not a real rational")
        mu = value.re
        if not (0 < mu < 1):
            raise InputError(f"mu sample {part!r} must lie strictly between 0 and 1")
        samples.append(mu)
    return samples


def _emit(payload, output: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if output is None or output == "-":
        print(text)
        return
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory and not os.path.isabs(output):
        output = os.path.join(directory, output)
    with open(output, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def _alphabet_from_args(args) -> Alphabet:
    if getattr(args, "alphabet", None):
        try:
            return Alphabet.parse(args.alphabet)
        except (ValueError, ScalarParseError) as exc:
            raise InputError(f"bad alphabet literal: {exc}") from exc
    if getattr(args, "problem", None):
        problem = _load_problem(args.problem)
        return spectral_decompose(problem).alphabet
    raise InputError("either --alphabet or --problem is required")


def _with_order(problem: PerturbationProblem, order: int | None) -> PerturbationProblem:
    if order is not None:
        problem = PerturbationProblem(
            e0=problem.e0, v=problem.v, hbar=problem.hbar, order=order
        )
    if problem.order < 1:
        raise InputError("the truncation order must be at least 1")
    return problem


def cmd_solve(args) -> int:
    problem = _with_order(_load_problem(args.input), args.order)
    mu_samples = _parse_mu_list(args.mu) if args.mu else []
    _note(args, f"solving dim {problem.dim} problem at order {problem.order}")
    out = solve(problem, mu_samples=mu_samples)
    _note(
        args,
        f"alphabet size {len(out.decomposition.alphabet)}, "
        f"{len(out.coefficient_table)} contributing words, "
        f"verification {'clean' if out.ok else 'VIOLATED'}",
    )
    _emit(out.to_json_dict(), args.output)
    return EXIT_OK if out.ok else EXIT_VIOLATION


def cmd_moulds(args) -> int:
    alphabet = _alphabet_from_args(args)
    engine = BirkhoffEngine(alphabet)
    acc = args.acc
    _note(args, f"alphabet size {len(alphabet)}, words up to length {args.max_length}")
    rows = []
    for word in alphabet.words_up_to(args.max_length):
        u_minus, u_plus = engine.decompose(word, acc)
        rows.append(
            {
                "word": alphabet.render_word(word),
                "T": engine.T.value(word, acc).to_json(),
                "U_minus": u_minus.to_json(),
                "U_plus": u_plus.to_json(),
                "R": format_scalar(engine.coeff_R(word)),
                "S": format_scalar(engine.coeff_S(word)),
                "N": format_scalar(engine.coeff_N(word)),
            }
        )
    _emit(rows, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    alphabet = _alphabet_from_args(args)
    engine = BirkhoffEngine(alphabet)
    if args.corrupt_word is not None:
        try:
            engine.corrupt_word(alphabet.parse_word(args.corrupt_word))
        except (KeyError, ValueError, ScalarParseError) as exc:
            raise InputError(f"bad --corrupt-word: {exc}") from exc
    max_length = args.max_length
    suites = {}
    equation = verify_mould_equation(engine, max_length)
    suites["mould_equation_S"] = _suite_json(equation.s_equation, alphabet)
    suites["mould_equation_R"] = _suite_json(equation.r_equation, alphabet)
    suites["symmetrality_S"] = _shuffle_json(equation.s_symmetral, alphabet)
    suites["factorization"] = _suite_json(verify_factorization(engine, max_length), alphabet)
    suites["support"] = _suite_json(verify_support(engine, max_length), alphabet)
    suites["grading_identities"] = _suite_json(
        verify_grading_identities(engine, max_length), alphabet
    )
    if alphabet.closed_under_negation and alphabet.purely_imaginary:
        suites["conjugation_symmetry"] = _suite_json(
            verify_conjugation_symmetry(engine, max_length), alphabet
        )
    for name, entry in suites.items():
        _note(args, f"suite {name}: {'ok' if entry['ok'] else 'VIOLATED'}")
    clean = all(entry["ok"] for entry in suites.values())
    _emit({"alphabet": [format_scalar(v) for v in alphabet.letters], "suites": suites}, args.output)
    return EXIT_OK if clean else EXIT_VIOLATION


def cmd_oracle(args) -> int:
    if args.input is not None:
        problem = _with_order(_load_problem(args.input), args.order)
    elif args.random_dim is not None:
        if args.seed is None:
            raise InputError("--random-dim requires --seed for reproducibility")
        problem = random_problem(args.random_dim, args.order or 4, args.seed)
    else:
        raise InputError("either a problem file or --random-dim is required")
    out = solve(problem, compare_oracle=False, with_generator=False)
    report = compare_with_oracle(problem, out.n_series)
    payload = {
        "problem": problem.to_json_dict(),
        "oracle_match": report.to_json(),
        "conjugacy_ok": out.conjugacy.ok,
    }
    _emit(payload, args.output)
    return EXIT_OK if report.ok and out.conjugacy.ok else EXIT_VIOLATION


def _suite_json(report, alphabet) -> dict:
    return {
        "ok": report.ok,
        "words_checked": report.words_checked,
        "violations": [
            {
                "word": alphabet.render_word(v.word),
                "identity": v.label,
                "lhs": str(v.lhs),
                "rhs": str(v.rhs),
            }
            for v in report.violations
        ],
    }


def _shuffle_json(report, alphabet) -> dict:
    return {
        "ok": report.ok,
        "pairs_checked": report.pairs_checked,
        "empty_word_ok": report.empty_word_ok,
        "violations": [v.describe(alphabet) for v in report.violations],
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mouldpert",
        description="Exact eigenvalue perturbation series via mould calculus",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="progress notes on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", parents=[common], help="normalize a problem file and verify it")
    p_solve.add_argument("input", help="problem JSON file")
    p_solve.add_argument("--order", "-K", type=int, default=None, help="override the truncation order")
    p_solve.add_argument("--mu", default=None, help="comma-separated rational samples in (0,1) for the numeric check")
    p_solve.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p_solve.set_defaults(func=cmd_solve)

    p_moulds = sub.add_parser("moulds", parents=[common], help="dump the mould table for an alphabet")
    p_moulds.add_argument("--alphabet", default=None, help='inline alphabet, e.g. "i,-i,2i,0"')
    p_moulds.add_argument("--problem", default=None, help="derive the alphabet from a problem file")
    p_moulds.add_argument("--max-length", "-L", type=int, default=3)
    p_moulds.add_argument("--acc", type=int, default=0, help="guaranteed accuracy of dumped series values")
    p_moulds.add_argument("--output", "-o", default=None)
    p_moulds.set_defaults(func=cmd_moulds)

    p_verify = sub.add_parser("verify", parents=[common], help="run the identity suites for an alphabet")
    p_verify.add_argument("--alphabet", default=None)
    p_verify.add_argument("--problem", default=None)
    p_verify.add_argument("--max-length", "-L", type=int, default=4)
    p_verify.add_argument(
        "--corrupt-word",
        default=None,
        help="debug: poison the scalar moulds on one word to prove the suites notice",
    )
    p_verify.add_argument("--output", "-o", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_oracle = sub.add_parser("oracle", parents=[common], help="diff the normal form against the recursive construction")
    p_oracle.add_argument("input", nargs="?", default=None, help="problem JSON file")
    p_oracle.add_argument("--random-dim", type=int, default=None, help="generate a random Hermitian problem instead")
    p_oracle.add_argument("--seed", type=int, default=None, help="seed for --random-dim")
    p_oracle.add_argument("--order", "-K", type=int, default=None)
    p_oracle.add_argument("--output", "-o", default=None)
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ScalarParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

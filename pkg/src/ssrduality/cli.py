"""Command-line front end: ``demo``, ``sweep``, ``threshold`` and ``twirl``.

Exit codes: 0 success, 1 a physics check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .duality import (
    LabelDoF,
    duality_test,
    encode_species,
    pdc_bosonic,
    pdc_distinguishable,
    relabel,
    symmetrized_distinguishable,
)
from .entanglement import (
    ENTANGLED_TOL,
    duality_certificate,
    ppt_report,
    twirled_frame_state,
    werner_ppt_threshold,
)
from .matcore import SPECTRAL_TOL, STRUCTURE_TOL, QubitFactorization, dump_matrix, projector
from .siv import (
    Convention,
    MinimizerOptions,
    siv_formation,
    werner_siv_closed_form,
    werner_siv_exact,
)
from .ssr import NEUTRAL, ChargeAssignment, local_charge_operator, sectors, twirl
from .states import (
    Party,
    PartyLayout,
    hyper_state,
    pair_layout,
    party_layout,
    system_with_frame,
    two_copies,
    werner,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = (
    "p",
    "min_pt_eigenvalue",
    "negativity",
    "frame_separable",
    "siv_closed_form",
    "siv_minimizer",
)


def fmt_num(x: float) -> str:
    return f"{float(x) + 0.0:.12g}"


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


@dataclass(frozen=True)
class SweepRow:
    p: float
    min_pt_eigenvalue: float
    negativity: float
    frame_separable: bool
    siv_closed_form: float
    siv_minimizer: float
    siv_closed_form_convention: Convention = Convention.UNNORMALIZED
    siv_minimizer_convention: Convention = Convention.FACTOR_FOUR

    @property
    def siv_ratio(self) -> Optional[float]:
        """Minimizer over closed form; ``None`` where the closed form vanishes."""
        if self.siv_closed_form == 0.0:
            return None
        return self.siv_minimizer / self.siv_closed_form

    def csv_fields(self) -> list[str]:
        return [
            fmt_num(self.p),
            fmt_num(self.min_pt_eigenvalue),
            fmt_num(self.negativity),
            fmt_bool(self.frame_separable),
            fmt_num(self.siv_closed_form),
            fmt_num(self.siv_minimizer),
        ]

    def json_object(self) -> dict:
        return {
            "p": float(fmt_num(self.p)),
            "min_pt_eigenvalue": float(fmt_num(self.min_pt_eigenvalue)),
            "negativity": float(fmt_num(self.negativity)),
            "frame_separable": self.frame_separable,
            "siv_closed_form": float(fmt_num(self.siv_closed_form)),
            "siv_minimizer": float(fmt_num(self.siv_minimizer)),
        }


def frame_charge_operator() -> np.ndarray:
    """Alice's type-a count on the two-slot Werner frame."""
    fact, layout = pair_layout()
    return local_charge_operator(fact, layout, Party.ALICE, ChargeAssignment())


def sweep_row(p: float, opts: MinimizerOptions) -> SweepRow:
    eff, fact, layout = twirled_frame_state(p)
    report = ppt_report(eff, fact, layout, ChargeAssignment())
    cert = duality_certificate(p)
    minimized = siv_formation(werner(p), frame_charge_operator(), opts=opts)
    return SweepRow(
        p=p,
        min_pt_eigenvalue=report.min_eigenvalue,
        negativity=report.negativity,
        frame_separable=cert.frame_separable,
        siv_closed_form=werner_siv_closed_form(p).value,
        siv_minimizer=minimized.value,
        siv_minimizer_convention=minimized.convention,
    )


def sweep_rows(p_values, opts: MinimizerOptions = MinimizerOptions()) -> list[SweepRow]:
    return [sweep_row(float(p), opts) for p in sorted(p_values)]


def manifest(args, opts: MinimizerOptions, timestamp: bool = True) -> dict:
    out = {
        "artifact": "ssrduality",
        "version": __version__,
        "seed": opts.seed,
        "p_min": args.p_min,
        "p_max": args.p_max,
        "steps": args.steps,
        "tolerances": {
            "structure": STRUCTURE_TOL,
            "spectral": SPECTRAL_TOL,
            "entangled_below": -ENTANGLED_TOL,
            "minimizer_step": opts.tol,
        },
        "minimizer": {
            "restarts": opts.restarts,
            "max_iterations": opts.max_iterations,
            "size_factor": opts.size_factor,
        },
        "conventions": {
            "siv_closed_form": Convention.UNNORMALIZED.value,
            "siv_minimizer": Convention.FACTOR_FOUR.value,
        },
    }
    if timestamp:
        out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return out


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def render_json(rows, meta: dict) -> str:
    doc = {"rows": [row.json_object() for row in rows], "manifest": meta}
    return json.dumps(doc, indent=2) + "\n"


def _check(out, ok: bool, label: str, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}", file=out)
    return ok


def cmd_demo(args, out=None) -> int:
    out = out or sys.stdout
    p = args.p
    results = []

    bos = duality_test(pdc_bosonic())
    results.append(
        _check(
            out,
            bos.passes and abs(bos.momentum_negativity - bos.polarization_negativity) <= SPECTRAL_TOL,
            "(1) bosonic pair shows duality",
            f"negativity momentum={fmt_num(bos.momentum_negativity)} "
            f"polarization={fmt_num(bos.polarization_negativity)}",
        )
    )

    dist = duality_test(pdc_distinguishable())
    results.append(
        _check(
            out,
            dist.momentum_negativity > ENTANGLED_TOL and dist.polarization_negativity <= STRUCTURE_TOL,
            "(2) distinguishable pair loses duality",
            f"negativity momentum={fmt_num(dist.momentum_negativity)} "
            f"polarization={fmt_num(dist.polarization_negativity)} (operationally mixed)",
        )
    )

    sym = duality_test(symmetrized_distinguishable())
    results.append(
        _check(
            out,
            sym.passes,
            "(3) symmetrized distinguishable pair shows duality",
            f"negativity momentum={fmt_num(sym.momentum_negativity)} "
            f"polarization={fmt_num(sym.polarization_negativity)}",
        )
    )

    cert = duality_certificate(p)
    eff, fact, layout = twirled_frame_state(p)
    lo = ppt_report(eff, fact, layout, ChargeAssignment()).min_eigenvalue
    detail = (
        f"p={fmt_num(p)} frame {'separable' if cert.frame_separable else 'entangled'}, "
        f"effective state {'entangled' if cert.dual_entangled else 'not entangled'} "
        f"(min PT eigenvalue {fmt_num(lo)})"
    )
    ok4 = cert.frame_separable and cert.dual_entangled
    results.append(_check(out, ok4, "(4) separable Werner frame activates duality", detail))
    if not cert.dual_entangled:
        print(
            f"      no activation: the twirled state counts as entangled only when its "
            f"minimum PT eigenvalue is below -{ENTANGLED_TOL:g}, i.e. p above about 4e-10",
            file=out,
        )
    if not cert.frame_separable:
        print("      the frame itself is entangled (PPT fails for p > 1/3)", file=out)

    if all(results):
        print("all checks passed", file=out)
        return EXIT_OK
    failed = [i + 1 for i, ok in enumerate(results) if not ok]
    print(f"failed checks: {', '.join(map(str, failed))}", file=out)
    return EXIT_CHECK_FAILED


def cmd_sweep(args, out=None) -> int:
    out = out or sys.stdout
    opts = MinimizerOptions(seed=args.seed)
    p_values = np.linspace(args.p_min, args.p_max, args.steps)
    rows = sweep_rows(p_values, opts)
    meta = manifest(args, opts, timestamp=not args.no_timestamp)
    if args.format == "csv":
        text = render_csv(rows)
    else:
        text = render_json(rows, meta)
    try:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.format == "csv":
            with open(args.out + ".manifest.json", "w") as fh:
                json.dump(meta, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    print(f"{'p':>6} {'min_pt_eig':>14} {'negativity':>12} {'sep':>5} "
          f"{'siv_closed':>12} {'siv_min':>12} {'ratio':>8}", file=out)
    for row in rows:
        ratio = "n/a" if row.siv_ratio is None else f"{row.siv_ratio:.6f}"
        print(
            f"{row.p:6.3f} {row.min_pt_eigenvalue:14.6e} {row.negativity:12.6e} "
            f"{fmt_bool(row.frame_separable):>5} {row.siv_closed_form:12.6e} "
            f"{row.siv_minimizer:12.6e} {ratio:>8}",
            file=out,
        )
    print(
        f"siv_closed_form is {Convention.UNNORMALIZED.value}, "
        f"siv_minimizer is {Convention.FACTOR_FOUR.value}; wrote {args.out}",
        file=out,
    )
    return EXIT_OK


def cmd_threshold(args, out=None) -> int:
    out = out or sys.stdout
    p_star = werner_ppt_threshold(args.tol)
    bound = werner_siv_closed_form(p_star)
    print(f"werner_ppt_threshold {p_star:.9f} (tol {args.tol:g})", file=out)
    print(f"siv_bound_{bound.convention.value} {bound.value:.9f}", file=out)
    print(
        f"siv_bound_{Convention.FACTOR_FOUR.value} {bound.to(Convention.FACTOR_FOUR).value:.9f}",
        file=out,
    )
    print(f"closed form at p = 1/3: {werner_siv_exact(Fraction(1, 3))}", file=out)
    return EXIT_OK


def twirl_target(name: str):
    """``(rho, fact, layout, charges, slot names)`` for a named state."""
    if name == "two-copies":
        fact, layout = party_layout()
        return projector(two_copies()), fact, layout, ChargeAssignment(), (
            "A_sys", "A_ref", "B_sys", "B_ref")
    if name.startswith("rho-p:"):
        p = float(name.split(":", 1)[1])
        rho, fact, layout = system_with_frame(p)
        return rho, fact, layout, ChargeAssignment(), ("A_sys", "A_ref", "B_sys", "B_ref")
    if name == "pdc-dist-pol":
        s = encode_species(relabel(pdc_distinguishable(), LabelDoF.POLARIZATION))
        return s.rho, s.fact, s.layout, s.charges, s.slot_names
    if name == "pdc-dist-mom":
        s = relabel(pdc_distinguishable(), LabelDoF.MOMENTUM)
        return s.rho, s.fact, s.layout, s.charges, s.slot_names
    if name == "hyper":
        # parties are the two particles; each holds one definite species
        return (projector(hyper_state()), QubitFactorization(4),
                PartyLayout((0, 2), (1, 3)), NEUTRAL, ("pol1", "pol2", "mom1", "mom2"))
    raise KeyError(name)


def cmd_twirl(args, out=None) -> int:
    out = out or sys.stdout
    try:
        rho, fact, layout, charges, names = twirl_target(args.state)
    except (KeyError, ValueError) as exc:
        print(f"error: unknown or invalid state {args.state!r} ({exc})", file=sys.stderr)
        return EXIT_USAGE
    eff = twirl(rho, fact, layout, charges)
    print(f"state {args.state}, slots ({', '.join(names)}), "
          f"Alice {layout.alice_slots}, Bob {layout.bob_slots}", file=out)
    if args.dump:
        print(dump_matrix(eff), file=out)
    else:
        n = fact.num_qubits
        for i, j in zip(*np.nonzero(np.abs(eff) > STRUCTURE_TOL)):
            print(f"  |{i:0{n}b}><{j:0{n}b}|  {fmt_num(eff[i, j].real)}"
                  + (f" {fmt_num(eff[i, j].imag)}j" if abs(eff[i, j].imag) > STRUCTURE_TOL else ""),
                  file=out)
    print("sectors (q_alice, q_bob): dim, trace", file=out)
    for sec in sectors(eff, fact, layout, charges):
        print(f"  {sec.charges}: {sec.dim}, {fmt_num(np.trace(sec.block).real)}", file=out)
    return EXIT_OK


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssrduality",
        description="Reference-frame activation of dual entanglement under superselection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="run the four duality checks")
    demo.add_argument("--p", type=_unit_interval, default=0.2,
                      help="Werner frame mixing parameter for check 4 (default 0.2)")

    sweep = sub.add_parser("sweep", help="tabulate the activation curve and SIV over p")
    sweep.add_argument("--p-min", type=_unit_interval, default=0.0)
    sweep.add_argument("--p-max", type=_unit_interval, default=1.0)
    sweep.add_argument("--steps", type=int, default=21)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--seed", type=int, default=42)
    sweep.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp from the manifest")

    thr = sub.add_parser("threshold", help="Werner PPT threshold and the SIV bound there")
    thr.add_argument("--tol", type=_positive, default=1e-6)

    tw = sub.add_parser("twirl", help="print a twirled state and its charge sectors")
    tw.add_argument("state", help="two-copies, rho-p:<p>, pdc-dist-pol, pdc-dist-mom or hyper")
    tw.add_argument("--dump", action="store_true", help="print the full matrix")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        if args.p_min > args.p_max:
            parser.error("--p-min must not exceed --p-max")
        if args.steps < 2:
            parser.error("--steps must be at least 2")
    handlers = {
        "demo": cmd_demo,
        "sweep": cmd_sweep,
        "threshold": cmd_threshold,
        "twirl": cmd_twirl,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface ``photon-lab``.

Every subcommand builds a report, wraps it together with its
:py:class:`RunManifest` and writes it as JSON or CSV to stdout or
``--out``. Exit codes:

- ``0``: success
- ``2``: invalid arguments, inputs outside a law's domain or an output
  format the report does not support
- ``3``: a numerical procedure did not converge
- ``4``: a physics check ran and exceeded its tolerance

"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _dist_version
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from photon_lab import em_fields
from photon_lab import photon_gas_mc
from photon_lab import photon_model
from photon_lab import spectral_laws
from photon_lab.constants import BOLTZMANN
from photon_lab.constants import CONSTANT_SET
from photon_lab.constants import HBAR
from photon_lab.constants import PLANCK
from photon_lab.constants import SPEED_OF_LIGHT
from photon_lab.errors import NonConvergenceError
from photon_lab.numerics import GENERATOR_NAME
from photon_lab.numerics import Grid4
from photon_lab.numerics import random_stream
from photon_lab.photon_statistics import QuantumHypothesis
from photon_lab.photon_statistics import compose_law
from photon_lab.photon_statistics import mean_occupancy
from photon_lab.spectral_laws import LAW_NAMES
from photon_lab.spectral_laws import SpectralLaw
from photon_lab.util import CheckResult
from photon_lab.util import failed_checks

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NON_CONVERGENCE = 3
EXIT_CHECK_FAILED = 4

#: quantum hypotheses selectable on the command line
HYPOTHESES: Dict[str, Callable[[], QuantumHypothesis]] = {
    "planck": QuantumHypothesis.planck,
    "half-quantum": QuantumHypothesis.half_quantum,
    "pair-planck": QuantumHypothesis.photon_pair,
    "rayleigh-jeans": QuantumHypothesis.equipartition,
    "planck-second": QuantumHypothesis.planck_second,
}

MODEL_TASKS = ("split", "classical-split", "period", "flux", "ensemble")

LOG_LEVELS = ("debug", "info", "warning", "error", "critical")


def tool_version() -> str:
    try:
        return _dist_version("photon-lab")
    except PackageNotFoundError:
        return "0+unknown"


class UnsupportedFormatError(ValueError):
    """The report has no representation in the requested format."""


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce an output file."""

    command: str
    argv: List[str]
    constant_set: str
    version: str
    options: Dict[str, Any]
    seed: Optional[int] = None
    generator: Optional[str] = None


@dataclass
class Table:
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)


@dataclass
class Report:
    """Output of one subcommand: a JSON-able ``body``, an optional
    ``table`` for CSV output and the checks that decide the exit code.

    """

    body: Dict[str, Any]
    table: Optional[Table] = None
    checks: List[CheckResult] = field(default_factory=list)


def _plain(value: Any) -> Any:
    """Converts numpy and dataclass values into JSON types."""
    if isinstance(value, CheckResult):
        return {
            "name": value.name,
            "residual": _plain(value.residual),
            "tolerance": _plain(value.tolerance),
            "passed": value.passed,
            "values": _plain(value.values),
        }
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _float_text(value: float) -> str:
    """17 significant digits, always read back as a float. Non-finite
    values never get here, :py:func:`_plain` turns them into strings.

    """
    text = format(value, ".17g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


class FixedDigitsEncoder(json.JSONEncoder):
    """Writes every float with 17 significant digits, like the CSV cells."""

    def iterencode(self, o, _one_shot=False):
        indent = self.indent
        if indent is not None and not isinstance(indent, str):
            indent = " " * indent
        encoder = (
            json.encoder.encode_basestring_ascii
            if self.ensure_ascii
            else json.encoder.encode_basestring
        )
        # pylint: disable-next=protected-access
        return json.encoder._make_iterencode(
            {} if self.check_circular else None,
            self.default,
            encoder,
            indent,
            _float_text,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )(o, 0)


def _dumps(value: Any, indent: Optional[int] = None) -> str:
    return json.dumps(_plain(value), indent=indent, cls=FixedDigitsEncoder)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit(manifest: RunManifest, report: Report, fmt: str) -> bytes:
    """Serializes ``report`` with its manifest.

    JSON holds the two objects ``manifest`` and ``report``; CSV starts
    with the manifest as ``#`` comment lines followed by the table. CSV
    raises :py:class:`UnsupportedFormatError` for reports without a table.

    """
    if fmt == "json":
        body = dict(report.body)
        if report.checks:
            body["checks"] = report.checks
            body["failed_checks"] = [
                c.name for c in failed_checks(report.checks)
            ]
        document = {"manifest": asdict(manifest), "report": body}
        return (_dumps(document, indent=2) + "\n").encode("utf-8")

    if fmt != "csv":
        raise UnsupportedFormatError(f"unknown output format '{fmt}'")
    if report.table is None:
        raise UnsupportedFormatError(
            f"'{manifest.command}' has no tabular output, use --format json"
        )
    buffer = io.StringIO(newline="")
    for key, value in asdict(manifest).items():
        buffer.write(f"# {key}: {_dumps(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.table.header)
    for row in report.table.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buffer.getvalue().encode("utf-8")


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as val_err:
        raise argparse.ArgumentTypeError(
            f"expected comma separated numbers, got '{text}'"
        ) from val_err


def _multipoles(text: str) -> List[List[int]]:
    try:
        pairs = [item.split(":") for item in text.split(",") if item.strip()]
        return [[int(l), int(m)] for l, m in pairs]
    except ValueError as val_err:
        raise argparse.ArgumentTypeError(
            f"expected l:m pairs like '1:0,2:2', got '{text}'"
        ) from val_err


def _frequency_grid(args: argparse.Namespace) -> np.ndarray:
    if args.points == 0:
        return np.empty(0)
    if not 0 < args.nu_min <= args.nu_max:
        raise ValueError(
            f"need 0 < nu-min <= nu-max, got {args.nu_min}, {args.nu_max}"
        )
    if args.spacing == "log":
        return np.geomspace(args.nu_min, args.nu_max, args.points)
    return np.linspace(args.nu_min, args.nu_max, args.points)


def cmd_spectrum(args: argparse.Namespace) -> Report:
    law = SpectralLaw.from_name(args.law)
    nu = _frequency_grid(args)
    values = (
        np.asarray(spectral_laws.evaluate(law, nu, args.temp))
        if len(nu)
        else np.empty(0)
    )
    sampled = spectral_laws.Spectrum(
        frequencies=nu, values=values, temperature=args.temp, law=law.name
    )
    table = Table(
        header=["nu_hz", "u_j_per_m3_hz"],
        rows=[[f, u] for f, u in zip(sampled.frequencies, sampled.values)],
    )
    return Report(
        body={
            "law": sampled.law,
            "temperature_k": sampled.temperature,
            "nu_hz": sampled.frequencies,
            "u_j_per_m3_hz": sampled.values,
        },
        table=table,
    )


def cmd_compare(args: argparse.Namespace) -> Report:
    law_a = SpectralLaw.from_name(args.law_a)
    law_b = SpectralLaw.from_name(args.law_b)
    x = np.geomspace(args.x_min, args.x_max, args.points)
    nu = x * BOLTZMANN * args.temp / PLANCK
    report = spectral_laws.compare(law_a, law_b, nu, args.temp)
    checks = []
    if args.max_rel_dev is not None:
        checks.append(
            CheckResult(
                name=f"max-rel-dev-{report.law_a}-vs-{report.law_b}",
                residual=report.max_rel_dev,
                tolerance=args.max_rel_dev,
            )
        )
    rows = [
        [r.nu, r.u_a, r.u_b, r.rel_dev, r.regime] for r in report.rows
    ]
    return Report(
        body={
            "law_a": report.law_a,
            "law_b": report.law_b,
            "temperature_k": report.temperature,
            "max_rel_dev": report.max_rel_dev,
            "max_rel_dev_nu_hz": report.location,
            "low_frequency_regime": report.low_frequency_regime,
            "low_frequency_ratio": report.low_frequency_ratio,
            "rows": [
                dict(zip(("nu_hz", "u_a", "u_b", "rel_dev", "regime"), row))
                for row in rows
            ],
        },
        table=Table(["nu_hz", "u_a", "u_b", "rel_dev", "regime"], rows),
        checks=checks,
    )


def cmd_stefan(args: argparse.Namespace) -> Report:
    law = SpectralLaw.from_name(args.law)
    fit = spectral_laws.stefan_fit(law, args.temps)
    reference = spectral_laws.stefan_fit(
        SpectralLaw(spectral_laws.LawVariant.PLANCK), args.temps
    )
    return Report(
        body={
            "law": fit.law,
            "slope": fit.slope,
            "prefactor": fit.prefactor,
            "prefactor_ratio_vs_planck": fit.prefactor / reference.prefactor,
            "temperatures_k": fit.temperatures,
            "totals_j_per_m3": fit.totals,
        },
        table=Table(
            ["temperature_k", "u_total_j_per_m3"],
            [[t, u] for t, u in zip(fit.temperatures, fit.totals)],
        ),
    )


def cmd_peak(args: argparse.Namespace) -> Report:
    law = SpectralLaw.from_name(args.law)
    nu_peak = spectral_laws.peak_frequency(law, args.temp)
    x_peak = PLANCK * nu_peak / (BOLTZMANN * args.temp)
    row = [args.temp, nu_peak, x_peak, nu_peak / args.temp]
    header = ["temperature_k", "nu_peak_hz", "x_peak", "nu_peak_over_t"]
    return Report(
        body={"law": law.name, **dict(zip(header, row))},
        table=Table(header, [row]),
    )


def cmd_compose(args: argparse.Namespace) -> Report:
    hyp = HYPOTHESES[args.hypothesis]()
    composed = compose_law(hyp)
    named = SpectralLaw(hyp.law_variant)
    nu = _frequency_grid(args)
    rows = []
    max_rel_dev = 0.0
    if len(nu):
        u_composed = spectral_laws.evaluate(composed, nu, args.temp)
        u_named = spectral_laws.evaluate(named, nu, args.temp)
        for f, a, b in zip(nu, u_composed, u_named):
            rel_dev = abs(a - b) / b if b > 0 else None
            if rel_dev is not None:
                max_rel_dev = max(max_rel_dev, rel_dev)
            rows.append([f, a, b, rel_dev])
    return Report(
        body={
            "hypothesis": args.hypothesis,
            "law": named.name,
            "entity_energy_h_nu": hyp.entity_energy.value,
            "mode_multiplicity": hyp.mode_multiplicity,
            "temperature_k": args.temp,
            "max_rel_dev": max_rel_dev,
        },
        table=Table(["nu_hz", "u_composed", "u_named", "rel_dev"], rows),
    )


def cmd_mc(args: argparse.Namespace) -> Report:
    hyp = HYPOTHESES[args.hypothesis]()
    nu = photon_gas_mc.log_spaced_modes(
        args.temp, hyp, args.x_min, args.x_max, args.modes
    )
    state = photon_gas_mc.ModeGasState.create(nu, args.temp, hyp, args.seed)
    if args.chains == 1:
        stats = photon_gas_mc.run(
            state, args.sweeps, args.burn_in, args.batches
        )
    else:
        stats = photon_gas_mc.run_chains(
            nu,
            args.temp,
            hyp,
            args.seed,
            args.chains,
            args.sweeps,
            args.burn_in,
            args.batches,
        )
    estimate = photon_gas_mc.spectrum_estimate(stats, state)
    expected_n = np.asarray(mean_occupancy(state.entity_energies(), args.temp))
    expected_u = np.asarray(
        spectral_laws.evaluate(SpectralLaw(hyp.law_variant), nu, args.temp)
    )

    # a mode that never left n = 0 has no batch error, the occupancy
    # resolution of the measured sweeps stands in for it
    resolution = 1.0 / math.sqrt((args.sweeps - args.burn_in) * args.chains)
    sigma_n = np.where(stats.stderr > 0, stats.stderr, resolution)
    sigma_u = hyp.density(nu) * state.entity_energies() * sigma_n
    z_occupancy = np.abs(stats.mean - expected_n) / sigma_n
    z_spectrum = np.abs(estimate.values - expected_u) / sigma_u
    checks = [
        CheckResult(
            name="occupancy-within-sigma",
            residual=float(np.max(z_occupancy)),
            tolerance=args.sigma,
            values={"worst_mode": int(np.argmax(z_occupancy))},
        ),
        CheckResult(
            name="spectrum-within-sigma",
            residual=float(np.max(z_spectrum)),
            tolerance=args.sigma,
            values={"worst_mode": int(np.argmax(z_spectrum))},
        ),
    ]
    header = [
        "nu_hz",
        "eps_over_kt",
        "mean_occupancy",
        "stderr",
        "expected_occupancy",
        "u_estimate",
        "u_error",
        "u_expected",
    ]
    rows = [
        list(row)
        for row in zip(
            nu,
            state.reduced_energies(),
            stats.mean,
            stats.stderr,
            expected_n,
            estimate.values,
            estimate.errors,
            expected_u,
        )
    ]
    return Report(
        body={
            "hypothesis": args.hypothesis,
            "temperature_k": args.temp,
            "seed": stats.seed,
            "generator": stats.generator,
            "sweeps": stats.sweeps,
            "burn_in": stats.burn_in,
            "batches": stats.batches,
            "chains": stats.chains,
            "modes": [dict(zip(header, row)) for row in rows],
        },
        table=Table(header, rows),
        checks=checks,
    )


def _check_table(checks: Sequence[CheckResult]) -> Table:
    return Table(
        ["name", "residual", "tolerance", "passed"],
        [[c.name, c.residual, c.tolerance, c.passed] for c in checks],
    )


def cmd_fields_check(args: argparse.Namespace) -> Report:
    checks = em_fields.run_field_checks(seed=args.seed, samples=args.samples)
    return Report(
        body={"seed": args.seed, "samples": args.samples},
        table=_check_table(checks),
        checks=checks,
    )


def cmd_tensor_check(args: argparse.Namespace) -> Report:
    packet = em_fields.CompactWavePacket()
    grid = packet.default_grid()
    if args.lattice_points is not None:
        grid = Grid4(
            spacing=grid.spacing,
            extent=grid.extent,
            points=args.lattice_points,
        )
    checks = em_fields.run_tensor_checks(
        seed=args.seed,
        samples=args.samples,
        packet=packet,
        grid=grid,
        volume=not args.no_volume,
    )
    return Report(
        body={
            "seed": args.seed,
            "samples": args.samples,
            "lattice_points": grid.points,
            "fd_spacing": grid.spacing,
        },
        table=_check_table(checks),
        checks=checks,
    )


def cmd_multipole_ratio(args: argparse.Namespace) -> Report:
    radius = args.kr * args.c / args.omega
    width = args.shell_width * args.c / args.omega
    checks = []
    rows = []
    for l, m in args.multipoles:
        ratio = em_fields.multipole_shell_ratio(
            l, m, args.omega, radius, width, c=args.c, exact=args.exact
        )
        expected = m / args.omega
        residual = abs(ratio - expected) / max(abs(expected), 1 / args.omega)
        rows.append([l, m, ratio, expected, residual])
        checks.append(
            CheckResult(f"ratio-l{l}-m{m}", residual, args.tolerance)
        )
    header = ["l", "m", "dj_du_s", "m_over_omega_s", "residual"]
    return Report(
        body={
            "omega_rad_per_s": args.omega,
            "kr": args.kr,
            "exact_fields": args.exact,
            "rows": [dict(zip(header, row)) for row in rows],
        },
        table=Table(header, rows),
        checks=checks,
    )


def _model_split(args: argparse.Namespace) -> Dict[str, Any]:
    spin, translational = photon_model.energy_split(args.nu)
    return {
        "nu_hz": args.nu,
        "spin_j": spin,
        "translational_j": translational,
        "sum_j": spin + translational,
        "h_nu_j": PLANCK * args.nu,
    }


def _model_classical_split(args: argparse.Namespace) -> Dict[str, Any]:
    kinetic, rotational = photon_model.classical_split(
        PLANCK * args.nu / SPEED_OF_LIGHT,
        SPEED_OF_LIGHT,
        HBAR,
        2 * math.pi * args.nu,
    )
    spin, translational = photon_model.energy_split(args.nu)
    return {
        "nu_hz": args.nu,
        "kinetic_j": kinetic,
        "rotational_j": rotational,
        "split_translational_j": translational,
        "split_spin_j": spin,
    }


def _model_one_form(args: argparse.Namespace) -> photon_model.OneFormField:
    if args.field == "vortex":
        return photon_model.vortex_one_form()
    return photon_model.gaussian_beam_one_form(width=args.width)


def _model_period(args: argparse.Namespace) -> Dict[str, Any]:
    one_form = _model_one_form(args)
    loop = photon_model.circle_loop(args.radius, windings=args.windings)
    result = photon_model.period_integral(one_form, loop)
    return {
        "field": one_form.name,
        "loop": loop.name,
        "period_j_s": result.value,
        "period_over_hbar": result.value / HBAR,
        "scale_j_s": result.scale,
        "segments": result.segments,
    }


def _model_flux(args: argparse.Namespace) -> Dict[str, Any]:
    one_form = photon_model.gaussian_beam_one_form(width=args.width)
    disk = photon_model.disk_patch(args.radius)
    flux = photon_model.flux_integral(one_form.curl_field(), disk)
    boundary = photon_model.period_integral(one_form, disk.boundary)
    return {
        "field": one_form.name,
        "surface": disk.name,
        "l_plus_s_j_s": flux,
        "boundary_period_j_s": boundary.value,
        "stokes_residual": abs(flux - boundary.value) / boundary.scale,
    }


def _model_ensemble(args: argparse.Namespace) -> Dict[str, Any]:
    rng = random_stream(args.seed)
    n = args.particles
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=-1)[:, None]
    energies = PLANCK * rng.uniform(1e14, 1e15, size=n)
    ensemble = photon_model.ParticleEnsemble(
        positions=rng.uniform(-1.0, 1.0, size=(n, 3)),
        momenta=directions * (energies / SPEED_OF_LIGHT)[:, None],
        energies=energies,
    )
    initial = photon_model.ensemble_angular_tensor(ensemble)
    later = photon_model.ensemble_angular_tensor(
        ensemble.advance(args.flight_time)
    )
    scale = float(np.max(np.abs(initial)))
    return {
        "particles": n,
        "seed": args.seed,
        "tensor": initial,
        "tensor_after_flight": later,
        "flight_time_s": args.flight_time,
        "antisymmetry_residual": float(np.max(np.abs(initial + initial.T))),
        "conservation_residual": float(np.max(np.abs(later - initial)))
        / scale,
    }


_MODEL_TASKS: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {
    "split": _model_split,
    "classical-split": _model_classical_split,
    "period": _model_period,
    "flux": _model_flux,
    "ensemble": _model_ensemble,
}


def cmd_model(args: argparse.Namespace) -> Report:
    return Report(body={"task": args.task, **_MODEL_TASKS[args.task](args)})


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        default="json",
        dest="fmt",
        help="output format",
    )
    parser.add_argument(
        "--out", type=Path, default=None, help="output file (default: stdout)"
    )
    parser.add_argument(
        "--log-level", choices=LOG_LEVELS, default="warning", help="log level"
    )


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=0, help="seed of the PCG64 stream"
    )


def _add_frequency_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--temp", type=float, default=5000.0, help="temperature in K"
    )
    parser.add_argument(
        "--nu-min", type=float, default=1e12, help="lowest frequency in Hz"
    )
    parser.add_argument(
        "--nu-max", type=float, default=1e15, help="highest frequency in Hz"
    )
    parser.add_argument(
        "--points", type=int, default=200, help="number of frequencies"
    )
    parser.add_argument(
        "--spacing",
        choices=("log", "linear"),
        default="log",
        help="spacing of the frequencies",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-lab",
        description="Black-body laws, photon statistics and field checks.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=tool_version())
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(
            name,
            help=help_text,
            description=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        _add_common(sub)
        sub.set_defaults(handler=handler)
        return sub

    sub = command("spectrum", cmd_spectrum, "tabulate a spectral law")
    sub.add_argument(
        "--law", choices=LAW_NAMES, default="planck", help="spectral law"
    )
    _add_frequency_grid(sub)

    sub = command("compare", cmd_compare, "compare two spectral laws")
    sub.add_argument(
        "--law-a", choices=LAW_NAMES, default="pair-planck", help="law A"
    )
    sub.add_argument(
        "--law-b", choices=LAW_NAMES, default="planck", help="reference law B"
    )
    sub.add_argument(
        "--temp", type=float, default=3000.0, help="temperature in K"
    )
    sub.add_argument(
        "--x-min", type=float, default=1e-3, help="lowest h nu / kT"
    )
    sub.add_argument(
        "--x-max", type=float, default=50.0, help="highest h nu / kT"
    )
    sub.add_argument(
        "--points", type=int, default=200, help="log-spaced samples"
    )
    sub.add_argument(
        "--max-rel-dev",
        type=float,
        default=None,
        help="fail (exit 4) above this relative deviation",
    )

    sub = command("stefan", cmd_stefan, "fit total energy density vs T")
    sub.add_argument(
        "--law", choices=LAW_NAMES, default="planck", help="spectral law"
    )
    sub.add_argument(
        "--temps",
        type=_floats,
        default="500,1000,2000,4000",
        help="comma separated temperatures in K",
    )

    sub = command("peak", cmd_peak, "locate the spectral maximum")
    sub.add_argument(
        "--law", choices=LAW_NAMES, default="planck", help="spectral law"
    )
    sub.add_argument(
        "--temp", type=float, default=1000.0, help="temperature in K"
    )

    sub = command("compose", cmd_compose, "law from a quantum hypothesis")
    sub.add_argument(
        "--hypothesis",
        choices=HYPOTHESES,
        default="half-quantum",
        help="quantum hypothesis",
    )
    _add_frequency_grid(sub)

    sub = command("mc", cmd_mc, "Monte Carlo photon gas")
    sub.add_argument(
        "--hypothesis",
        choices=[name for name in HYPOTHESES if name != "rayleigh-jeans"],
        default="half-quantum",
        help="quantum hypothesis",
    )
    sub.add_argument(
        "--temp", type=float, default=5000.0, help="bath temperature in K"
    )
    sub.add_argument("--modes", type=int, default=30, help="number of modes")
    sub.add_argument(
        "--x-min", type=float, default=0.1, help="lowest entity energy / kT"
    )
    sub.add_argument(
        "--x-max", type=float, default=5.0, help="highest entity energy / kT"
    )
    sub.add_argument(
        "--sweeps", type=int, default=1_000_000, help="sweeps per chain"
    )
    sub.add_argument(
        "--burn-in", type=int, default=10_000, help="discarded sweeps"
    )
    sub.add_argument(
        "--batches",
        type=int,
        default=photon_gas_mc.DEFAULT_BATCHES,
        help="batches of the standard error estimate",
    )
    sub.add_argument(
        "--chains", type=int, default=1, help="independent chains"
    )
    _add_seed(sub)
    sub.add_argument(
        "--sigma", type=float, default=3.0, help="allowed standard errors"
    )

    sub = command("fields-check", cmd_fields_check, "field identities")
    _add_seed(sub)
    sub.add_argument(
        "--samples", type=int, default=20, help="random samples per check"
    )

    sub = command("tensor-check", cmd_tensor_check, "tensor identities")
    _add_seed(sub)
    sub.add_argument(
        "--samples", type=int, default=20, help="random sample points"
    )
    sub.add_argument(
        "--lattice-points",
        type=int,
        default=None,
        help="nodes per axis of the volume lattice (default: packet's own)",
    )
    sub.add_argument(
        "--no-volume",
        action="store_true",
        help="skip the volume integral checks",
    )

    sub = command(
        "multipole-ratio", cmd_multipole_ratio, "shell dJz/dU of multipoles"
    )
    sub.add_argument(
        "--multipoles",
        type=_multipoles,
        default="1:0,1:1,2:1,2:2",
        help="comma separated l:m pairs",
    )
    sub.add_argument(
        "--omega", type=float, default=1.0, help="angular frequency in rad/s"
    )
    sub.add_argument("--c", type=float, default=1.0, help="speed of light")
    sub.add_argument(
        "--kr", type=float, default=20.0, help="shell radius as omega r / c"
    )
    sub.add_argument(
        "--shell-width",
        type=float,
        default=0.5,
        help="shell width in units of c / omega",
    )
    sub.add_argument(
        "--exact", action="store_true", help="integrate the full fields"
    )
    sub.add_argument(
        "--tolerance",
        type=float,
        default=em_fields.RATIO_TOLERANCE,
        help="allowed relative deviation from m / omega",
    )

    sub = command("model", cmd_model, "photon model constructs")
    sub.add_argument("task", choices=MODEL_TASKS, help="construct to run")
    sub.add_argument("--nu", type=float, default=1e15, help="frequency in Hz")
    sub.add_argument(
        "--field",
        choices=("vortex", "gaussian-beam"),
        default="vortex",
        help="one-form of the period task",
    )
    sub.add_argument(
        "--radius", type=float, default=1.0, help="loop or disk radius in m"
    )
    sub.add_argument(
        "--width", type=float, default=0.5, help="beam waist in m"
    )
    sub.add_argument(
        "--windings", type=int, default=1, help="windings of the loop"
    )
    sub.add_argument(
        "--particles", type=int, default=4, help="ensemble size"
    )
    sub.add_argument(
        "--flight-time", type=float, default=1e-9, help="free flight in s"
    )
    _add_seed(sub)
    return parser


def _manifest(args: argparse.Namespace, argv: List[str]) -> RunManifest:
    options = {
        key: value
        for key, value in vars(args).items()
        if key not in ("handler", "command", "out")
    }
    seed = getattr(args, "seed", None) if args.command == "mc" else None
    return RunManifest(
        command=args.command,
        argv=list(argv),
        constant_set=CONSTANT_SET,
        version=tool_version(),
        options=options,
        seed=seed,
        generator=GENERATOR_NAME if seed is not None else None,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parses ``argv``, runs the subcommand and returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_OK if exit_.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    manifest = _manifest(args, argv)
    try:
        report = args.handler(args)
        payload = emit(manifest, report, args.fmt)
    except NonConvergenceError as err:
        sys.stderr.write(f"photon-lab: did not converge: {err}\n")
        return EXIT_NON_CONVERGENCE
    except (ValueError, TypeError, ZeroDivisionError) as err:
        sys.stderr.write(f"photon-lab {args.command}: error: {err}\n")
        return EXIT_USAGE

    if args.out is None:
        sys.stdout.write(payload.decode("utf-8"))
        sys.stdout.flush()
    else:
        args.out.write_bytes(payload)

    failed = failed_checks(report.checks)
    for check in failed:
        _logger.error(
            "check %s failed: residual %g above tolerance %g",
            check.name,
            check.residual,
            check.tolerance,
        )
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

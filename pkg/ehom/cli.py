# -*- coding: utf-8 -*-

"""Command line interface.

Every subcommand reads a scenario configuration, either JSON or key-value text::

    # |1> and a coherent state with mean photon number 9
    mode1.kind = "fock"
    mode1.n = 1
    mode2.kind = "coherent"
    mode2.nbar = 9
    detector.eta1 = 0.9
    detector.eta2 = 0.9
    output_cutoff = 30

Values are parsed as JSON literals where possible and kept as strings otherwise. The exit status
is 0 on success, 1 for configuration errors, 2 if a quadrature or a series did not converge and 3
if ``cnl --expect-cnl`` finds no central nodal line.
"""

import argparse
import copy
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from ._module_utils import ConvergenceError
from .counting import CountingParams, fs_cs_counting_matrix
from .data import simulate_figure1_panels, write_csv, write_json
from .distributions import CNL_THRESHOLD_OFFSET, DetectorModel, apply_efficiency, cnl_scan, joint_distribution
from .fock import ScatteringMatrix, enumerate_diagrams, mirror_pair_check
from .spacetime import (
    CwMode,
    GaussianMode,
    TimingParams,
    fs_cs_total_vs_tau,
    hom_total_broadened,
    hom_total_vs_tau,
    sweep,
)
from .states import DEFAULT_TOLERANCE, BipartiteInput, make_state

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "parse_key_value", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_CNL_ABSENT = 3

SECTION_KEYS = {
    "mode1": {"kind", "n", "beta", "nbar", "amplitudes", "probabilities", "normalise", "tol"},
    "mode2": {"kind", "n", "beta", "nbar", "amplitudes", "probabilities", "normalise", "tol"},
    "beamsplitter": {"t"},
    "detector": {"eta1", "eta2"},
    "spacetime": {"model", "tau", "delta_tau", "delta_omega", "broadening", "tau_c", "flux", "nbar"},
    "sweep": {"parameter", "start", "stop", "steps"},
    "counting": {"eta", "nbar", "n_max", "t0", "tau", "tau_c", "delta_omega", "flux", "mode1"},
    "figure1": {"nbar", "photon_numbers"},
    "output": {"path", "format"},
}
SCALAR_KEYS = {"output_cutoff", "tol", "cnl_threshold"}
SPACETIME_MODELS = ("hom", "hom-broadened", "fs-cs")
TIMING_KEYS = ("tau", "delta_tau", "delta_omega", "broadening")


class ConfigError(ValueError):
    """Invalid scenario configuration, ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message, key=None, line=None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key {key!r}")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.key = key
        self.line = line


@dataclass
class ScenarioConfig:
    """Scenario configuration with one attribute per section.

    Sections are plain dictionaries so that they can be passed on to the library functions.
    Missing entries take the defaults of the subcommand that uses them.
    """

    mode1: dict = field(default_factory=lambda: {"kind": "fock", "n": 1})
    mode2: dict = field(default_factory=lambda: {"kind": "coherent", "nbar": 9})
    beamsplitter: dict = field(default_factory=lambda: {"t": "balanced"})
    detector: dict = field(default_factory=lambda: {"eta1": 1.0, "eta2": 1.0})
    output_cutoff: int = None
    tol: float = DEFAULT_TOLERANCE
    cnl_threshold: float = CNL_THRESHOLD_OFFSET
    spacetime: dict = field(default_factory=lambda: {"model": "hom"})
    sweep: dict = field(default_factory=lambda: {"parameter": "tau", "start": -4.0, "stop": 4.0, "steps": 81})
    counting: dict = field(default_factory=lambda: {"eta": 1.0, "nbar": 4.0, "n_max": 5})
    figure1: dict = field(default_factory=lambda: {"nbar": 9.0, "photon_numbers": [0, 1, 2, 3]})
    output: dict = field(default_factory=lambda: {"format": "csv"})

    @classmethod
    def from_mapping(cls, mapping, lines=None):
        """Build a configuration from a nested mapping, rejecting unknown sections and keys.

        ``lines`` optionally maps dotted keys to the line they were read from.
        """
        lines = lines or {}
        config = cls()
        for section, value in mapping.items():
            if section in SCALAR_KEYS:
                setattr(config, section, value)
                continue
            if section not in SECTION_KEYS:
                raise ConfigError("unknown section", key=section, line=lines.get(section))
            if not isinstance(value, dict):
                raise ConfigError("a section must be a mapping", key=section, line=lines.get(section))
            for key in value:
                if key not in SECTION_KEYS[section]:
                    dotted = f"{section}.{key}"
                    raise ConfigError("unknown key", key=dotted, line=lines.get(dotted))

            # Mode sections are replaced as a whole, since the keys depend on the state kind
            if section in {"mode1", "mode2"}:
                setattr(config, section, dict(value))
            else:
                getattr(config, section).update(value)
        return config

    def to_dict(self):
        return {name: copy.deepcopy(value) for name, value in vars(self).items()}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip().strip("\"'")


def parse_key_value(text):
    """Parse ``section.key = value`` lines into a :class:`ScenarioConfig`.

    Examples
    --------
    >>> config = parse_key_value("mode1.kind = fock\\nmode1.n = 3  # odd\\ntol = 1e-12")
    >>> config.mode1, config.tol
    ({'kind': 'fock', 'n': 3}, 1e-12)
    """
    mapping = {}
    lines = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=line_number)

        key, value = (part.strip() for part in line.split("=", 1))
        lines[key] = line_number
        if "." in key:
            section, entry = key.split(".", 1)
            lines.setdefault(section, line_number)
            if section in SCALAR_KEYS:
                raise ConfigError(f"{section} is not a section", key=key, line=line_number)
            mapping.setdefault(section, {})[entry] = _parse_value(value)
        else:
            if key not in SCALAR_KEYS:
                raise ConfigError("unknown key", key=key, line=line_number)
            mapping[key] = _parse_value(value)

    return ScenarioConfig.from_mapping(mapping, lines=lines)


def load_config(path):
    """Read a JSON (``.json`` suffix or leading ``{``) or key-value configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read configuration file {path}: {e}") from e

    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e
        if not isinstance(mapping, dict):
            raise ConfigError("the configuration must be a JSON object")
        return ScenarioConfig.from_mapping(mapping)
    return parse_key_value(text)


def _beamsplitter(config):
    t = config.beamsplitter.get("t", "balanced")
    if t == "balanced":
        return ScatteringMatrix.balanced()
    try:
        return ScatteringMatrix.from_transmission(float(t))
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e), key="beamsplitter.t") from e


def _input_state(config):
    states = []
    for name in ("mode1", "mode2"):
        try:
            states.append(make_state(getattr(config, name), tol=config.tol))
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(str(e), key=name) from e
    return BipartiteInput(*states)


def _joint(config):
    joint = joint_distribution(_input_state(config), _beamsplitter(config))
    detector = DetectorModel(config.detector.get("eta1", 1.0), config.detector.get("eta2", 1.0))
    if detector.eta1 < 1 or detector.eta2 < 1:
        joint = apply_efficiency(joint, detector)
    logger.info("Joint distribution of shape %s, truncation bound %.3g", joint.shape, joint.truncation_bound)
    return joint


def _output_path(config, default_name):
    fmt = config.output.get("format", "csv")
    if fmt not in {"csv", "json"}:
        raise ConfigError(f"unknown output format {fmt!r}", key="output.format")
    return Path(config.output.get("path", f"{default_name}.{fmt}")), fmt


def _write(result, config, default_name, metadata=None):
    path, fmt = _output_path(config, default_name)
    if fmt == "csv":
        write_csv(result, path)
    else:
        write_json(result, path, metadata=metadata)
    return path


def cmd_joint_dist(config, args):
    joint = _joint(config)
    if config.output_cutoff is not None:
        joint = joint.crop(config.output_cutoff)
    _write(joint, config, "joint")
    return EXIT_OK


def cmd_cnl_scan(config, args):
    joint = _joint(config)
    report = cnl_scan(joint, threshold_offset=config.cnl_threshold)
    print(f"{report.verdict} (largest diagonal entry {report.max_diagonal:.3g}, threshold {report.threshold:.3g})")

    diagonal = report.to_frame()
    if config.output_cutoff is not None:
        diagonal = diagonal[diagonal["m"] <= config.output_cutoff]
    _write(diagonal, config, "cnl", metadata={"verdict": report.verdict, "threshold": report.threshold})
    if args.expect_cnl and not report.present:
        return EXIT_CNL_ABSENT
    return EXIT_OK


def _single_photon_mode(settings):
    """Gaussian packet of width ``tau_c`` detuned by ``delta_omega`` from the coherent state."""
    return GaussianMode(frequency=float(settings.get("delta_omega", 0.0)), width=float(settings.get("tau_c", 1.0)))


def _spacetime_sweep(config):
    settings = dict(config.spacetime)
    model = settings.pop("model", "hom")
    if model not in SPACETIME_MODELS:
        raise ConfigError(f"unknown model {model!r}, must be one of {SPACETIME_MODELS}", key="spacetime.model")

    parameter = config.sweep.get("parameter", "tau")
    start = float(config.sweep.get("start", -4.0))
    stop = float(config.sweep.get("stop", 4.0))
    grid = {parameter: np.linspace(start, stop, int(config.sweep.get("steps", 81)))}

    if model == "hom":
        func, names = hom_total_vs_tau, ("tau", "delta_tau", "delta_omega")
    elif model == "hom-broadened":
        func, names = hom_total_broadened, ("delta_tau", "broadening")
    else:
        func, names = fs_cs_total_vs_tau, ("tau",)
    if parameter not in names:
        raise ConfigError(f"cannot sweep {parameter!r} for the {model} model", key="sweep.parameter")

    timing = TimingParams(**{name: float(settings[name]) for name in TIMING_KEYS if name in settings})
    fixed = {}
    if model == "fs-cs":
        fixed["mode1"] = _single_photon_mode(settings)
        fixed["mode2"] = CwMode(flux=float(settings.get("flux", 1.0)))
        fixed["nbar"] = float(settings.get("nbar", 1.0))
    return sweep(func, grid, timing=timing, **fixed)


def cmd_time_scan(config, args):
    table = _spacetime_sweep(config)
    _write(table, config, "time_scan", metadata={"spacetime": config.spacetime, "sweep": config.sweep})
    failed = table["status"] != "ok"
    if failed.any():
        logger.error("Quadrature failed for %s of %s grid points", int(failed.sum()), len(table))
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _counting_params(config):
    settings = config.counting
    if settings.get("mode1", "gaussian") == "cw":
        mode1 = CwMode(flux=1.0)
    else:
        mode1 = _single_photon_mode(settings)
    return CountingParams(
        eta=float(settings.get("eta", 1.0)),
        N1=0,
        N2=0,
        nbar=float(settings.get("nbar", 4.0)),
        mode1=mode1,
        mode2=CwMode(flux=float(settings.get("flux", 1.0))),
        t0=float(settings.get("t0", 0.0)),
        tau=float(settings.get("tau", 0.0)),
    )


def cmd_counting(config, args):
    params = _counting_params(config)
    table = fs_cs_counting_matrix(params, int(config.counting.get("n_max", 5)))
    _write(table, config, "counting", metadata={"counting": config.counting})
    return EXIT_OK


def cmd_diagrams(config, args):
    n, m = args.n, args.m
    if (n + m) % 2:
        raise ConfigError(f"|{n}, {m}> has an odd photon number and no coincident output |N, N>")
    N = (n + m) // 2
    print(f"Scattering diagrams for |{n}, {m}> -> |{N}, {N}> at the balanced beamsplitter")
    for diagram in enumerate_diagrams(n, m, N, N):
        exponents = ", ".join(f"{name}^{exponent}" for name, exponent in diagram.exponents.items())
        print(f"  A_{diagram.k}: C_k = {diagram.combinatorial_factor}, {exponents}, amplitude {diagram.amplitude()}")

    report = mirror_pair_check(min(n, m), max(n, m))
    for k, k_mirror, verdict in report.verdicts():
        print(f"  pair ({k}, {k_mirror}): {verdict}")
    if report.unpaired_middle is not None:
        print(f"  unpaired middle diagram: {report.unpaired_middle}")
    print("Coincidence amplitude vanishes" if report.cancels else "Coincidence amplitude does not vanish")
    return EXIT_OK


def cmd_figure1(config, args):
    panels = simulate_figure1_panels(
        nbar=float(config.figure1.get("nbar", 9.0)),
        photon_numbers=config.figure1.get("photon_numbers", (0, 1, 2, 3)),
        tol=config.tol,
        output_cutoff=30 if config.output_cutoff is None else config.output_cutoff,
    )
    directory = Path(config.output.get("path", "figure1"))
    directory.mkdir(parents=True, exist_ok=True)

    verdicts = []
    m_a, m_b = np.indices(panels.shape[-2:])
    for state in panels.coords["Mode-2 state"].values:
        for n in panels.coords["n"].values:
            panel = panels.sel({"Mode-2 state": state, "n": n})
            frame = pd.DataFrame({"ma": m_a.ravel(), "mb": m_b.ravel(), "p": panel.values.ravel()})
            write_csv(frame, directory / f"{state}_n{n}.csv")
            verdicts.append({"mode2_state": state, "n": int(n), "cnl_present": bool(panel.coords["cnl_present"])})

    write_csv(pd.DataFrame(verdicts), directory / "cnl_verdicts.csv")
    return EXIT_OK


COMMANDS = {
    "joint": cmd_joint_dist,
    "cnl": cmd_cnl_scan,
    "time-scan": cmd_time_scan,
    "counting": cmd_counting,
    "diagrams": cmd_diagrams,
    "figure1": cmd_figure1,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="ehom", description="Extended Hong-Ou-Mandel beamsplitter simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="Less logging (repeatable)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON or key-value scenario file")
    common.add_argument("--out", type=Path, help="Output file (directory for figure1)")
    common.add_argument("--format", choices=("csv", "json"), help="Output format")
    common.add_argument("--cutoff", type=int, help="Largest output photon number to write")
    common.add_argument("--tol", type=float, help="Truncation tolerance of the input states")

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("joint", parents=[common], help="Joint output photon-number distribution")
    cnl = subparsers.add_parser("cnl", parents=[common], help="Scan the diagonal for a central nodal line")
    cnl.add_argument("--expect-cnl", action="store_true", help="Exit with status 3 if there is no nodal line")
    subparsers.add_parser("time-scan", parents=[common], help="Space-time coincidence sweeps")
    subparsers.add_parser("counting", parents=[common], help="Photon-counting matrices for |1, beta>")
    diagrams = subparsers.add_parser("diagrams", parents=[common], help="List the scattering diagrams of |n, m>")
    diagrams.add_argument("n", type=int)
    diagrams.add_argument("m", type=int)
    subparsers.add_parser("figure1", parents=[common], help="Fock states against coherent and thermal states")
    return parser


def _apply_overrides(config, args):
    if args.out is not None:
        config.output["path"] = str(args.out)
    if args.format is not None:
        config.output["format"] = args.format
    if args.cutoff is not None:
        config.output_cutoff = args.cutoff
    if args.tol is not None:
        config.tol = args.tol
    return config


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * args.verbose + 10 * args.quiet
    level = min(max(level, logging.DEBUG), logging.CRITICAL)
    logging.basicConfig(level=level, format="%(levelname)s:%(name)s:%(message)s")

    try:
        config = load_config(args.config) if args.config is not None else ScenarioConfig()
        config = _apply_overrides(config, args)
        logger.info("Running %s", args.command)
        return COMMANDS[args.command](config, args)
    except ConvergenceError as e:
        logger.error("%s (best estimate %s, error estimate %s)", e, e.value, e.error)
        return EXIT_NOT_CONVERGED
    except (ConfigError, ValueError, TypeError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())

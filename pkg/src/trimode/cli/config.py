"""Line-oriented ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Every command has a flat table
of parameters (:data:`COMMANDS`); unknown keys are rejected and missing keys
take the documented default.  The keys ``command``, ``output`` and
``format`` are accepted in any file.
"""

import math
from dataclasses import dataclass, field

from ..classical import Direction
from ..errors import ValidationError


class ConfigParseError(ValidationError):
    """Malformed configuration line."""

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__("line", f"line {lineno}: {message}")


@dataclass(frozen=True)
class Param:
    """Type and default of one configuration key.

    Kinds: ``float`` (finite real), ``rate`` (>= 0), ``positive`` (> 0),
    ``count`` (integer >= 1), ``angle``, ``direction``, ``spacing``,
    ``switch`` (on/off) and ``list`` (comma-separated rates).
    A default of ``None`` means the value is derived ("auto").
    """

    kind: str
    default: object
    help: str = ""


_ANGLES = {"0": 0.0, "pi/2": math.pi / 2, "pi": math.pi, "3pi/2": 3 * math.pi / 2}


def parse_angle(text):
    t = text.replace(" ", "").replace("*", "").lower()
    if t in _ANGLES:
        return _ANGLES[t]
    return float(t)


def format_angle(value):
    for name, v in _ANGLES.items():
        if value == v:
            return name
    return repr(float(value))


def _convert(key, p, raw):
    raw = raw.strip()
    if p.default is None and raw.lower() == "auto":
        return None
    try:
        if p.kind == "angle":
            v = parse_angle(raw)
        elif p.kind == "direction":
            return Direction.parse(raw)
        elif p.kind == "spacing":
            if raw.lower() not in ("linear", "log"):
                raise ValidationError(key, f"{key} must be 'linear' or 'log', got {raw!r}")
            return raw.lower()
        elif p.kind == "switch":
            low = raw.lower()
            if low in ("on", "true", "yes", "1"):
                return True
            if low in ("off", "false", "no", "0"):
                return False
            raise ValidationError(key, f"{key} must be on or off, got {raw!r}")
        elif p.kind == "count":
            v = int(raw)
            if v < 1:
                raise ValidationError(key, f"{key} must be a positive integer, got {raw!r}")
            return v
        elif p.kind == "list":
            vals = tuple(float(x) for x in raw.split(",") if x.strip())
            if not vals or any(not math.isfinite(x) or x < 0 for x in vals):
                raise ValidationError(key, f"{key} must be a list of nonnegative numbers, got {raw!r}")
            return vals
        else:
            v = float(raw)
    except ValidationError:
        raise
    except ValueError:
        raise ValidationError(key, f"{key}: cannot read {raw!r} as {p.kind}") from None
    if not math.isfinite(v):
        raise ValidationError(key, f"{key} must be finite, got {raw!r}")
    if p.kind == "rate" and v < 0:
        raise ValidationError(key, f"{key} must be >= 0, got {raw!r}")
    if p.kind == "positive" and v <= 0:
        raise ValidationError(key, f"{key} must be > 0, got {raw!r}")
    return v


def _format(p, value):
    if value is None:
        return "auto"
    if p.kind == "angle":
        return format_angle(value)
    if p.kind == "direction":
        return value.value
    if p.kind == "switch":
        return "on" if value else "off"
    if p.kind == "list":
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_CLASSICAL = {
    "P": Param("rate", 0.005, "drive strength 4 g^2 kappa alpha_in^2 / omega_m^4"),
    "Delta": Param("float", 0.5, "detuning over omega_m"),
    "kappa": Param("positive", 0.05, "optical decay over omega_m"),
    "gamma": Param("rate", 1e-3, "mechanical decay over omega_m"),
    "direction": Param("direction", Direction.FORWARD, "drive port: forward or backward"),
}

_NETWORK = {
    "kappa": Param("positive", 1.0, "signal-mode decay, both blocks"),
    "Gamma": Param("positive", 0.1, "effective mechanical damping, both blocks"),
    "Gamma1": Param("positive", None, "damping of block 1 (default Gamma)"),
    "Gamma2": Param("positive", None, "damping of block 2 (default Gamma)"),
    "kappad": Param("positive", 5.0, "auxiliary-cavity decay"),
    "gamma_fraction": Param("rate", 0.01, "intrinsic share of the mechanical damping"),
    "theta": Param("angle", math.pi / 2, "loop phase"),
    "Jm": Param("rate", None, "phonon hopping (auto: optimal)"),
    "J0": Param("rate", None, "photon hopping (auto: design rule)"),
    "G1": Param("rate", None, "pump coupling, block 1 (auto: design rule)"),
    "G2": Param("rate", None, "pump coupling, block 2 (auto: design rule)"),
}

COMMANDS = {
    "dynamics run": dict(_CLASSICAL, **{
        "t_end": Param("positive", 5e4, "final time"),
        "dt_out": Param("positive", 0.5, "output sample spacing"),
        "forcing": Param("switch", True, "apply the decaying kick"),
        "force_f": Param("float", None, "kick amplitude (auto: forward X+)"),
        "force_T": Param("positive", 1e3, "kick duration"),
        "rtol": Param("positive", 1e-9, "relative tolerance"),
        "atol": Param("positive", 1e-12, "absolute tolerance"),
    }),
    "dynamics fixed-points": dict(_CLASSICAL),
    "dynamics regions": {
        "kappa": _CLASSICAL["kappa"], "gamma": _CLASSICAL["gamma"],
        "direction": _CLASSICAL["direction"],
        "P_min": Param("positive", 1e-3, "lower drive strength"),
        "P_max": Param("positive", 2.0, "upper drive strength"),
        "P_points": Param("count", 200, "points along P"),
        "P_spacing": Param("spacing", "log", "linear or log"),
        "Delta_min": Param("positive", 0.05, "lower detuning"),
        "Delta_max": Param("positive", 2.0, "upper detuning"),
        "Delta_points": Param("count", 200, "points along Delta"),
        "Delta_spacing": Param("spacing", "linear", "linear or log"),
    },
    "dynamics hopf": {
        "Delta": Param("list", (0.5,), "detunings, comma separated"),
        "kappa": _CLASSICAL["kappa"], "gamma": _CLASSICAL["gamma"],
        "direction": _CLASSICAL["direction"],
        "P_min": Param("positive", None, "scan start (auto: just above threshold)"),
        "P_max": Param("positive", 1.0, "scan end"),
    },
    "scatter spectrum": dict(_NETWORK, **{
        "omega_min": Param("float", -2.0, "grid start"),
        "omega_max": Param("float", 2.0, "grid end"),
        "points": Param("count", 4096, "uniform grid points"),
        "densify": Param("switch", True, "add clustered points near the interference frequency"),
    }),
    "scatter optimize": {k: _NETWORK[k] for k in
                         ("kappa", "Gamma", "Gamma1", "Gamma2", "kappad", "gamma_fraction")},
    "scatter gamma-sweep": {
        "kappa": _NETWORK["kappa"], "kappad": _NETWORK["kappad"],
        "Gamma_min": Param("positive", 1e-3, "smallest damping"),
        "Gamma_max": Param("positive", 0.5, "largest damping"),
        "points": Param("count", 64, "number of dampings"),
        "spacing": Param("spacing", "log", "linear or log"),
        "Gamma_values": Param("list", None, "explicit dampings (overrides the range)"),
    },
    "scatter asym-map": {
        "kappa": _NETWORK["kappa"], "kappad": _NETWORK["kappad"],
        "Gamma1_min": Param("positive", 0.01, ""), "Gamma1_max": Param("positive", 0.5, ""),
        "Gamma1_points": Param("count", 16, ""),
        "Gamma2_min": Param("positive", 0.01, ""), "Gamma2_max": Param("positive", 0.5, ""),
        "Gamma2_points": Param("count", 16, ""),
        "spacing": Param("spacing", "linear", "linear or log, both axes"),
        "Gamma1_values": Param("list", None, "explicit Gamma1 values"),
        "Gamma2_values": Param("list", None, "explicit Gamma2 values"),
    },
    "full spectrum": dict(_NETWORK, **{
        "Gamma": Param("positive", 0.04, "effective mechanical damping, both blocks"),
        "kappad": Param("positive", 10.0, "auxiliary-cavity decay"),
        "ratio": Param("positive", 20.0, "sideband ratio omega_m / kappa"),
        "offset_min": Param("float", -2.0, "grid start relative to omega_m"),
        "offset_max": Param("float", 2.0, "grid end relative to omega_m"),
        "points": Param("count", 4096, "uniform grid points"),
    }),
    "full sideband-sweep": {
        "ratios": Param("list", (10.0, 20.0, 50.0, 85.0, 100.0, 200.0, 500.0), "sideband ratios"),
        "kappa": _NETWORK["kappa"],
        "Gamma": Param("positive", None, "mechanical damping (auto: kappa/25)"),
        "kappad": Param("positive", None, "auxiliary decay (auto: 10 kappa)"),
        "theta": _NETWORK["theta"],
    },
}

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """One validated command invocation."""

    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str = None
    format: str = "csv"

    def to_text(self):
        """Canonical config text; parsing it yields an equal config."""
        table = COMMANDS[self.command]
        lines = [f"command = {self.command}"]
        if self.output_path is not None:
            lines.append(f"output = {self.output_path}")
        lines.append(f"format = {self.format}")
        for key, value in self.parameters.items():
            lines.append(f"{key} = {_format(table[key], value)}")
        return "\n".join(lines) + "\n"


def read_pairs(text):
    """Raw ``(key, value, lineno)`` triples from config text."""
    pairs = []
    seen = {}
    for n, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(n, f"expected 'key = value', got {body!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if not key or not value:
            raise ConfigParseError(n, f"empty key or value in {body!r}")
        if key in seen:
            raise ConfigParseError(n, f"duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = n
        pairs.append((key, value, n))
    return pairs


def parse_config(text, command=None, overrides=(), output_path=None, fmt=None):
    """Parse and validate configuration text.

    Parameters
    ----------
    text : str
        ``key = value`` lines.
    command : str, optional
        Overrides a ``command`` key in the text.
    overrides : iterable of str
        Extra ``key=value`` items applied after the text.

    Returns
    -------
    RunConfig

    Raises
    ------
    ConfigParseError
        Malformed line (carries ``lineno``).
    ValidationError
        Unknown key or bad value; ``key`` names the offender.
    """
    raw = {}
    for key, value, _ in read_pairs(text):
        raw[key] = value
    for item in overrides:
        if "=" not in item:
            raise ValidationError(item, f"override must be key=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        raw[k] = v
    text_cmd = raw.pop("command", None)
    cmd = " ".join((command or text_cmd or "").split())
    if text_cmd is not None and command is not None and " ".join(text_cmd.split()) != cmd:
        raise ValidationError("command", f"config is for {text_cmd!r}, invoked as {cmd!r}")
    if cmd not in COMMANDS:
        raise ValidationError("command", f"unknown command {cmd!r}")
    out = raw.pop("output", None)
    form = raw.pop("format", "csv")
    out = output_path if output_path is not None else out
    form = fmt if fmt is not None else form
    if form not in FORMATS:
        raise ValidationError("format", f"format must be csv or json, got {form!r}")
    table = COMMANDS[cmd]
    for key in raw:
        if key not in table:
            raise ValidationError(key, f"unknown key {key!r} for {cmd}")
    params = {key: (_convert(key, p, raw[key]) if key in raw else p.default)
              for key, p in table.items()}
    return RunConfig(cmd, params, out, form)

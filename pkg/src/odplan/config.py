"""INI-style planning configuration.

Four sections: ``[environment]``, ``[obstacles]``, ``[radio]`` and ``[ga]``.
Every key maps onto a field of the matching dataclass below; unknown keys are
rejected so typos surface as errors rather than silently using defaults.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .geometry import GridEnvironment, Obstacle, build_grid, place_random_obstacles
from .ga import GaConfig
from .propagation import RadioParams


class ConfigError(ValueError):
    """Bad configuration, optionally tied to a line of the source file."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        self.message = message
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class EnvironmentSection:
    x_min: float = 0.0
    y_min: float = 0.0
    x_max: float = 30.0
    y_max: float = 12.0
    grid_size: float = 1.0
    ap_on_boundary_only: bool = False


@dataclass(frozen=True)
class ObstacleSection:
    random_count: int = 0
    length: float = 20.0
    width: float = 3.0
    height: float = 9.0
    loss: float = 7.37
    seed: int = 0
    # explicit rectangles: x0 y0 x1 y1 [height [loss]], one per line
    boxes: tuple = ()


@dataclass(frozen=True)
class RadioSection:
    pl0: float = 39.87
    n: float = 1.78
    tp_max: float = 7.0
    ap_attenuation: float = 0.0
    gain_tx: float = 3.0
    gain_rx: float = 2.15
    shadowing_margin: float = 1.0
    fading_margin: float = 0.0
    interference_margin: float = 0.0
    threshold: float = -68.0
    d_ap_min: float = 5.0
    ap_height: float = 2.0
    rx_height: float = 1.4
    # descriptive only
    standard: str = ""
    frequency_band: str = ""
    required_bitrate: str = ""
    antenna: str = ""

    @property
    def margin(self) -> float:
        return self.shadowing_margin + self.fading_margin + self.interference_margin


@dataclass(frozen=True)
class PlanConfig:
    environment: EnvironmentSection = field(default_factory=EnvironmentSection)
    obstacles: ObstacleSection = field(default_factory=ObstacleSection)
    radio: RadioSection = field(default_factory=RadioSection)
    ga: GaConfig = field(default_factory=GaConfig)

    def radio_params(self) -> RadioParams:
        r = self.radio
        return RadioParams(pl0=r.pl0, n=r.n, tp_max=r.tp_max - r.ap_attenuation,
                           gain_tx=r.gain_tx, gain_rx=r.gain_rx, margin=r.margin,
                           threshold=r.threshold, d_ap_min=r.d_ap_min,
                           ap_height=r.ap_height, rx_height=r.rx_height)

    def build(self) -> tuple[GridEnvironment, tuple[Obstacle, ...], RadioParams, GaConfig]:
        e = self.environment
        env = build_grid(e.x_min, e.y_min, e.x_max, e.y_max, e.grid_size,
                         boundary_only=e.ap_on_boundary_only)
        o = self.obstacles
        obstacles = [Obstacle(*b) for b in o.boxes]
        if o.random_count:
            obstacles += place_random_obstacles(env, o.random_count, o.length, o.width,
                                                o.height, o.loss, o.seed)
        return env, tuple(obstacles), self.radio_params(), self.ga


SECTIONS = {"environment": EnvironmentSection, "obstacles": ObstacleSection,
            "radio": RadioSection, "ga": GaConfig}


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for diagnostics."""
    out, section = {}, None
    for no, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            continue
        m = re.match(r"([^\s#;=:][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            out[(section, m.group(1).strip().lower())] = no
    return out


def _parse_bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"expected yes/no, got {raw!r}")


def _parse_boxes(raw: str) -> tuple:
    boxes = []
    for row in raw.strip().splitlines():
        row = row.split("#", 1)[0].strip()
        if not row:
            continue
        vals = [float(v) for v in row.replace(",", " ").split()]
        if not 4 <= len(vals) <= 6:
            raise ValueError(f"box needs 4 to 6 numbers (x0 y0 x1 y1 [height [loss]]), got {row!r}")
        Obstacle(*vals)
        boxes.append(tuple(vals))
    return tuple(boxes)


def _convert(name: str, default, raw: str):
    if name == "boxes":
        return _parse_boxes(raw)
    if isinstance(default, bool):
        return _parse_bool(raw)
    if isinstance(default, int):
        return int(raw.strip())
    if isinstance(default, float):
        return float(raw.strip())
    return raw.strip()


def parse_config(text: str, source: str = "<config>") -> PlanConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("key outside any section; expected a [section] header first",
                          e.lineno, source) from e
    except configparser.ParsingError as e:
        line, content = e.errors[0]
        raise ConfigError(f"cannot parse {content.strip()!r} (expected key = value)",
                          line, source) from e
    except configparser.Error as e:
        msg = re.sub(r"^While reading from .*?\]: ", "", getattr(e, "message", str(e)))
        raise ConfigError(msg.splitlines()[0], getattr(e, "lineno", None), source) from e
    lines = _key_lines(text)
    parts = {}
    present = {}
    for section in cp.sections():
        name = section.lower()
        if name not in SECTIONS or name in present:
            what = "unknown" if name not in SECTIONS else "duplicate"
            raise ConfigError(f"{what} section [{section}]", _section_line(text, section), source)
        present[name] = section
    for name, cls in SECTIONS.items():
        base = cls()
        known = {f.name: getattr(base, f.name) for f in fields(cls)}
        values = {}
        if name in present:
            for key, raw in cp.items(present[name]):
                line = lines.get((name, key))
                if key not in known:
                    raise ConfigError(f"unknown key {key!r} in [{name}]", line, source)
                try:
                    values[key] = _convert(key, known[key], raw)
                except ValueError as e:
                    raise ConfigError(f"[{name}] {key}: {e}", line, source) from e
        try:
            parts[name] = replace(base, **values)
        except ValueError as e:
            key = next((k for k in values if k in str(e)), next(iter(values), None))
            raise ConfigError(f"[{name}] {e}", lines.get((name, key)), source) from e
    cfg = PlanConfig(**parts)
    try:
        cfg.radio_params()
    except ValueError as e:
        raise ConfigError(str(e), lines.get(("radio", "d_ap_min")), source) from e
    return cfg


def _section_line(text: str, section: str) -> int | None:
    for no, line in enumerate(text.splitlines(), 1):
        if line.strip().lower() == f"[{section.lower()}]":
            return no
    return None


def read_config(path) -> PlanConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", None, str(path)) from e
    return parse_config(text, str(path))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        s = f"{v:.2f}"
        return s if float(s) == v else repr(v)
    return str(v)


def dump_config(cfg: PlanConfig) -> str:
    """Serialise to INI text that ``parse_config`` reads back unchanged."""
    out = []
    for name in SECTIONS:
        sec = getattr(cfg, name)
        out.append(f"[{name}]")
        for f in fields(sec):
            v = getattr(sec, f.name)
            if f.name == "boxes":
                rows = ["    " + " ".join(_fmt(float(x)) for x in b) for b in v]
                out.append("boxes =" + ("\n" + "\n".join(rows) if rows else ""))
            else:
                out.append(f"{f.name} = {_fmt(v)}")
        out.append("")
    return "\n".join(out)


def load_config(path) -> tuple[GridEnvironment, tuple[Obstacle, ...], RadioParams, GaConfig]:
    """Read a config file and build the environment, obstacles, radio and GA settings."""
    cfg = read_config(path)
    try:
        return cfg.build()
    except ValueError as e:
        raise ConfigError(str(e), None, str(path)) from e

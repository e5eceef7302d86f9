"""
Scenario file loading.

Scenario files are TOML with one table per SweepConfig section. Parse and
validation failures become ConfigError carrying the offending field and,
when it can be found, the 1-based line number.
"""

import logging
import re
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib
from importlib import resources
from pathlib import Path

from pydantic import ValidationError

from ..core.errors import ConfigError
from ..models.sweep import SweepConfig
from .method_registry import method_registry

logger = logging.getLogger(__name__)

SCENARIO_PACKAGE = "impulse_ser.scenarios"

_TOML_LINE = re.compile(r"line (\d+)")


def _locate(text: str, loc: tuple[str | int, ...]) -> int | None:
    """Line of the deepest key of loc that appears in the file."""
    if not loc:
        return None
    table, key = str(loc[0]), str(loc[1]) if len(loc) > 1 else None
    in_table = False
    table_line = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            in_table = line.strip("[] ") == table
            if in_table:
                table_line = number
            continue
        if in_table and key is not None and re.match(rf"{re.escape(key)}\s*=", line):
            return number
    return table_line


def parse_config(text: str, base_dir: Path | None = None) -> SweepConfig:
    """
    Parse scenario TOML text.

    Args:
        text: TOML document
        base_dir: Directory that relative mixture_file paths resolve against

    Returns:
        Validated SweepConfig

    Raises:
        ConfigError: On TOML syntax errors, invalid fields or unknown methods.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE.search(str(e))
        raise ConfigError(
            f"invalid TOML: {e}", line=int(match.group(1)) if match else None
        ) from e

    try:
        config = SweepConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first["loc"])
        raise ConfigError(
            first["msg"],
            field=".".join(str(part) for part in loc) or None,
            line=_locate(text, loc),
        ) from e

    unknown = [m for m in config.methods.analytic if m not in method_registry.list_methods()]
    if unknown:
        raise ConfigError(
            f"unknown method(s) {unknown}; available: {method_registry.list_methods()}",
            field="methods.analytic",
            line=_locate(text, ("methods", "analytic")),
        )

    mixture_file = config.noise.mixture_file
    if mixture_file and base_dir is not None and not Path(mixture_file).is_absolute():
        config = config.with_value("noise.mixture_file", str(base_dir / mixture_file))
    return config


def bundled_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    root = resources.files(SCENARIO_PACKAGE)
    return sorted(p.name.removesuffix(".toml") for p in root.iterdir() if p.name.endswith(".toml"))


def load_config(source: str | Path) -> SweepConfig:
    """
    Load a scenario from a path, or by bundled name when no such file exists.

    Raises:
        ConfigError: If the file is missing, unreadable or invalid.
    """
    path = Path(source)
    if path.is_file():
        logger.info(f"Loading scenario file {path}")
        return parse_config(path.read_text(), base_dir=path.parent)

    name = str(source).removesuffix(".toml")
    if name in bundled_scenarios():
        logger.info(f"Loading bundled scenario '{name}'")
        text = resources.files(SCENARIO_PACKAGE).joinpath(f"{name}.toml").read_text()
        return parse_config(text)

    raise ConfigError(
        f"no scenario file or bundled scenario named '{source}'; "
        f"bundled: {bundled_scenarios()}"
    )

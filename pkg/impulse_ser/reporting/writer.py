"""CSV and fit-report writer.

Renders '#'-prefixed header lines from Jinja2 templates and writes the
numeric body with full repr precision. Output carries no timestamps, so
identical inputs give byte-identical files.
"""

import logging
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, TemplateNotFound

from .. import __version__
from ..core.config import Config
from ..models.schemas import DiscretePdf, FitResult, SerCurve
from ..models.sweep import SweepConfig

logger = logging.getLogger(__name__)

REQUIRED_TEMPLATES = ("csv_header.j2", "fit_report.j2")


def _summary(section: object, skip: tuple[str, ...] = ()) -> str:
    data = section.model_dump()  # type: ignore[attr-defined]
    return " ".join(f"{k}={v}" for k, v in data.items() if k not in skip and v not in (None, []))


class ReportWriter:
    """
    Writes sweep CSVs and fit reports.

    Uses Jinja2 templates for the header blocks; the CSV body is plain
    comma-separated text, one row per (curve, axis point).
    """

    def __init__(self, templates_dir: str | Path | None = None):
        """
        Initialize the writer.

        Args:
            templates_dir: Directory containing the Jinja2 templates.
                Defaults to the package's templates directory.
        """
        if templates_dir is None:
            templates_dir = Path(__file__).parent.parent / "templates"
        else:
            templates_dir = Path(templates_dir)

        if not templates_dir.exists():
            raise FileNotFoundError(f"Templates directory not found: {templates_dir}")

        self.templates_dir = templates_dir
        self.env = Environment(
            loader=FileSystemLoader(str(templates_dir)),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        logger.debug(f"ReportWriter using templates from: {templates_dir}")

    def _render_template(self, template_name: str, context: dict) -> str:
        """
        Render a template with the given context.

        Raises:
            TemplateNotFound: If the template file does not exist.
        """
        logger.debug(f"Rendering template: {template_name}")
        try:
            template = self.env.get_template(template_name)
        except TemplateNotFound as e:
            logger.error(f"Template not found: {e}")
            raise TemplateNotFound(
                f"Required template not found: {e.name}\n"
                f"Ensure all templates exist in {self.templates_dir}"
            ) from e
        return template.render(**context)

    def validate_templates(self) -> dict[str, bool]:
        """Map each required template to whether it exists."""
        status = {}
        for name in REQUIRED_TEMPLATES:
            exists = (self.templates_dir / name).exists()
            status[name] = exists
            if not exists:
                logger.warning(f"Template missing: {name}")
        return status

    # =========================================================================
    # Sweep CSV
    # =========================================================================

    def render_header(self, cfg: SweepConfig, simulate: bool) -> str:
        notes = []
        if cfg.channel.kind != "flat":
            notes.append(
                f"fading tap profile exp(-{cfg.channel.decay} l) over {cfg.channel.taps} taps "
                f"is an implementation choice"
            )
        if cfg.curves is not None:
            notes.append(f"curves over {cfg.curves.parameter}")
        context = {
            "version": __version__,
            "scenario": cfg.scenario.name,
            "description": cfg.scenario.description,
            "config_hash": cfg.config_hash(),
            "seed": cfg.simulation.seed,
            "axis_name": cfg.axis.name,
            "threshold_units": cfg.suppressor.threshold_units,
            "noise": _summary(cfg.noise),
            "suppressor": _summary(cfg.suppressor, skip=("threshold_units",)),
            "channel": _summary(cfg.channel),
            "L": cfg.ofdm.subcarriers,
            "M": cfg.ofdm.qam_order,
            "cp_len": cfg.ofdm.cp_len if cfg.ofdm.cp_len is not None else "taps",
            "signal_power": repr(cfg.ofdm.signal_power),
            "methods": cfg.methods.analytic,
            "simulate": simulate,
            "budget": cfg.simulation.budget,
            "confidence": Config.CONFIDENCE_LEVEL,
            "notes": notes,
        }
        return self._render_template("csv_header.j2", context)

    def render_curves(self, curves: list[SerCurve], cfg: SweepConfig) -> str:
        """
        Full CSV text for a sweep.

        Columns: curve label, axis value, one column per method and, for
        simulated sweeps, the simulated SER and its Wilson half-width.
        """
        simulate = any(c.simulated is not None for c in curves)
        methods = list(cfg.methods.analytic)
        columns = ["curve", cfg.axis.name, *methods]
        if simulate:
            columns += ["simulated", "half_width"]

        lines = [self.render_header(cfg, simulate).rstrip("\n"), ",".join(columns)]
        for curve in curves:
            order = sorted(range(len(curve.axis_values)), key=lambda i: curve.axis_values[i])
            for i in order:
                row = [curve.label, repr(float(curve.axis_values[i]))]
                row += [repr(float(curve.predictions[m][i])) for m in methods]
                if simulate and curve.simulated is not None and curve.simulated_half_width:
                    row += [
                        repr(float(curve.simulated[i])),
                        repr(float(curve.simulated_half_width[i])),
                    ]
                lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_curves(self, curves: list[SerCurve], cfg: SweepConfig, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render_curves(curves, cfg))
        logger.info(f"Wrote {sum(len(c.axis_values) for c in curves)} rows to {path}")
        return path

    # =========================================================================
    # Fit report
    # =========================================================================

    def render_fit_report(self, result: FitResult, target: DiscretePdf, source: str) -> str:
        """Report comment lines followed by the fitted weights/variances block."""
        context = {
            "version": __version__,
            "source": source,
            "points": target.grid.size,
            "step": repr(target.step),
            "target_variance": repr(target.variance),
            "K": result.K,
            "knee_points": [repr(k) for k in result.knee_points],
            "d_max": repr(result.d_max),
            "kl_divergence": repr(result.kl_divergence),
            "max_relative_error": repr(result.max_relative_error),
            "raw_weight_sum": repr(result.raw_weight_sum),
            "block": result.mixture.to_config_block().rstrip("\n"),
        }
        return self._render_template("fit_report.j2", context)

    def write_fit_report(
        self, result: FitResult, target: DiscretePdf, source: str, path: str | Path
    ) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render_fit_report(result, target, source))
        logger.info(f"Wrote {result.K}-component fit report to {path}")
        return path

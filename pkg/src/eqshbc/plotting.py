"""Static figures for sweep results (matplotlib, no pyplot state)."""

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from .model import Interaction, ScenarioKind  # noqa: E402
from .transfer import cutoff_frequency  # noqa: E402

#: Fixed SVG id salt so repeated renders are byte-identical.
SVG_HASH_SALT = "eqshbc"

AXIS_LABELS = {
    "frequency": "Frequency (Hz)",
    "distance": "Distance (m)",
    "contact-area": "Contact area (m$^2$)",
    "named-capacitance": "Capacitance (F)",
}


def sweep_figure(result):
    """Single axes, log-x when the sweep is log spaced, magnitude in dB.

    A touch scenario swept over frequency gets the contact cutoff f_c marked,
    plus a -3 dB line below the high-frequency plateau.
    """
    xs = [r.axis_value for r in result.rows]
    ys = [r.mag_db for r in result.rows]
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(xs, ys, lw=1.5, label="|T|")
    if xs[0] > 0 and xs[-1] / xs[0] >= 10:
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS[result.axis])
    ax.set_ylabel("|T| (dB)")

    scenario = result.scenario
    if (
        result.axis == "frequency"
        and scenario.interaction is Interaction.TOUCH
        and scenario.contact is not None
    ):
        fc = cutoff_frequency(scenario.contact)
        ax.axvline(fc, color="tab:red", ls="--", lw=1, label=f"f_c = {fc:.3g} Hz")
        if scenario.kind is ScenarioKind.GROUNDED_METAL:
            ax.axhline(max(ys) - 3.0, color="tab:gray", ls=":", lw=1, label="-3 dB")
    meta = result.metadata
    ax.set_title(f"{meta.get('model_variant', '')} | {meta.get('scenario_digest', '')}", fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def save_sweep_plot(result, path):
    """Render ``result`` to ``path``; format follows the file suffix."""
    fig = sweep_figure(result)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        try:
            fig.savefig(path, metadata={"Date": None} if str(path).endswith((".svg", ".pdf")) else None)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc

"""Broadcasting protocols, closed-form oracles, verdicts and scans."""

from qbroadcast.pipelines.audits import (
    BoundCheck,
    DiscordAudit,
    discord_audit_1to2,
    discord_formula,
    local_output_bound,
    separability_bound_check,
    separability_bound_report,
)
from qbroadcast.pipelines.closed_forms import (
    ClosedForm13Coeffs,
    Mode,
    PairForm,
    closed_form_1to2,
    closed_form_direct13,
    closed_form_successive,
    coeffs_13,
    forms_1to2,
    forms_direct13,
    forms_successive,
)
from qbroadcast.pipelines.ensemble import (
    BroadcastVerdict,
    Group,
    OutputEnsemble,
    Verdict1to3,
    pair_wires,
    verdict,
    verdict_1to3,
)
from qbroadcast.pipelines.scans import (
    ScanTable,
    StateGrid,
    StrategyGrid,
    asymmetry_cutoff,
    fig2_table,
    fig4_table,
    fig6_table,
    k_ranges,
    mems_threshold,
    min_threshold_concurrence,
    scan_range,
)
from qbroadcast.pipelines.simulate import (
    broadcast_1to2_local,
    broadcast_1to2_nonlocal,
    direct13_broadcast,
    successive_broadcast,
)

__all__ = [
    "BoundCheck",
    "BroadcastVerdict",
    "ClosedForm13Coeffs",
    "DiscordAudit",
    "Group",
    "Mode",
    "OutputEnsemble",
    "PairForm",
    "ScanTable",
    "StateGrid",
    "StrategyGrid",
    "Verdict1to3",
    "asymmetry_cutoff",
    "broadcast_1to2_local",
    "broadcast_1to2_nonlocal",
    "closed_form_1to2",
    "closed_form_direct13",
    "closed_form_successive",
    "coeffs_13",
    "direct13_broadcast",
    "discord_audit_1to2",
    "discord_formula",
    "fig2_table",
    "fig4_table",
    "fig6_table",
    "forms_1to2",
    "forms_direct13",
    "forms_successive",
    "k_ranges",
    "local_output_bound",
    "mems_threshold",
    "min_threshold_concurrence",
    "pair_wires",
    "scan_range",
    "separability_bound_check",
    "separability_bound_report",
    "successive_broadcast",
    "verdict",
    "verdict_1to3",
]

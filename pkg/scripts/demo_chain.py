"""End-to-end walkthrough on a three-node chain: a -> b -> t with a direct a -> t edge.

Builds the project, saves its canonical file, prints the direct and total
influence matrices, the rating for the target, and a small what-if sweep.

Run: python3 scripts/demo_chain.py [output_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from munidss import (
    ImpactEstimate,
    Indicator,
    MunicipalProfile,
    PermittedRange,
    Project,
    TargetIndicator,
    build_matrix,
    rating,
    save_project,
    total_influence_series,
    what_if,
)
from munidss.influence import matrix_to_csv


def chain_project() -> Project:
    return Project(
        id="chain-demo",
        profile=MunicipalProfile(
            mf_type="municipal_district", sed_level="medium", rural_settlement_count=4
        ),
        indicators=(
            Indicator(id="roads", name="Road quality index", kind="quantitative", current_value=5.0),
            Indicator(id="jobs", name="Employment rate", kind="quantitative", current_value=9.0),
        ),
        targets=(TargetIndicator(id="qol", name="Quality of life"),),
        estimates=(
            ImpactEstimate(expert_id="e1", source="roads", sink="jobs", value=0.5),
            ImpactEstimate(expert_id="e1", source="jobs", sink="qol", value=0.4),
            ImpactEstimate(expert_id="e1", source="roads", sink="qol", value=0.2),
        ),
        ranges=(
            PermittedRange(indicator_id="roads", lo=3.0, hi=7.0),
            PermittedRange(indicator_id="jobs", lo=3.0, hi=7.0),
        ),
    )


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    project = chain_project()
    path = save_project(project, out_dir / "chain-demo.json")
    print(f"saved canonical project file: {path}\n")

    direct = build_matrix(project)
    total = total_influence_series(direct)
    print("direct aggregated matrix:")
    print(matrix_to_csv(direct.node_order, direct.entries))
    print(f"total influence (series, k={total.k}, radius estimate {total.rho_estimate:.3g}):")
    print(matrix_to_csv(total.node_order, total.entries))

    result = rating(project, total, "qol")
    print("rating for 'qol':")
    for entry in result.entries:
        print(
            f"  #{entry.rank} {entry.indicator_id:<6} total={entry.total_impact:.3f} "
            f"direct={entry.direct_impact:+.3f} relevance={entry.relevance:.2f} "
            f"criticality={entry.criticality.token}"
        )

    print("\nwhat-if sweep on 'roads':")
    for shock in (0.5, 1.0, 2.0):
        outcome = what_if(project, total, {"roads": shock})
        print(f"  +{shock:<4} -> jobs {outcome['jobs']:+.3f}, qol {outcome['qol']:+.3f}")


if __name__ == "__main__":
    main()

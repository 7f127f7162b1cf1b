"""Regenerate the golden files in this directory.

Run from the repository root:  python3 tests/golden/regen.py
Every artifact is deterministic (fixed seeds), so reruns must be no-ops.
"""

from pathlib import Path

from ghzlab import exact_game_value, make_planted, make_strategy
from ghzlab.cli import main as cli_main
from ghzlab.extraction import PipelineConfig, full_pipeline
from ghzlab.fileio import (
    extraction_report_to_json,
    golden_value_to_json,
    write_json,
)

HERE = Path(__file__).parent


def regen() -> None:
    write_json(HERE / "game_value_n2.json", golden_value_to_json(2, exact_game_value(2).eta))

    for n in (2, 3, 4):
        rep = full_pipeline(make_strategy("constant1", n), PipelineConfig(seed=0))
        write_json(HERE / f"extract_const1_n{n}.json", extraction_report_to_json(rep))

    planted = make_planted(4, seed=1)
    rep = full_pipeline(
        planted.cross, PipelineConfig(seed=1, freiman_mode="randomized")
    )
    write_json(HERE / "extract_planted_n4_seed1.json", extraction_report_to_json(rep))

    cli_main(
        [
            "decay",
            "--family",
            "product-constant1",
            "--n-from",
            "1",
            "--n-to",
            "6",
            "--mode",
            "exact",
            "--out",
            str(HERE / "decay_exact_n1_6.csv"),
        ]
    )


if __name__ == "__main__":
    regen()

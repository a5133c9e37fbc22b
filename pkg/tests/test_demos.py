import runpy
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"
FAST = ["sns_cost_table.py", "custom_generator.py", "channel_simulation.py", "merging_and_entropy_rate.py"]


@pytest.mark.parametrize("name", FAST)
def test_demo_runs(name, capsys):
    runpy.run_path(str(DEMOS / name), run_name="__main__")
    assert capsys.readouterr().out

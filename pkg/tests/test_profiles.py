from pathlib import Path

import pytest

from qkrylov.profiles import apply_profile, load_profiles


def test_load_and_apply_profile(tmp_path: Path):
    cfg = tmp_path / "profiles.yaml"
    cfg.write_text(
        """
demo:
  blur: "gaussian:r=35,sigma=10"
  max-it: 50
  tol: 1.0e-2
notes: "not a profile"
        """,
        encoding="utf-8",
    )
    profiles = load_profiles(cfg)
    assert set(profiles) == {"demo"}
    assert profiles["demo"]["max_it"] == 50
    merged = apply_profile("demo", profiles, {"blur": None, "tol": None})
    assert merged["blur"] == "gaussian:r=35,sigma=10"
    # CLI override wins
    merged2 = apply_profile("demo", profiles, {"blur": "uniform:s=3", "tol": None})
    assert merged2["blur"] == "uniform:s=3"
    assert merged2["tol"] == 1e-2


def test_missing_profiles_file_and_unknown_name(tmp_path: Path):
    assert load_profiles(tmp_path / "absent.yaml") == {}
    assert apply_profile(None, {}, {"tol": 1.0}) == {"tol": 1.0}
    with pytest.raises(ValueError, match="unknown profile"):
        apply_profile("demo", {}, {})


def test_shipped_profiles_parse():
    root = Path(__file__).resolve().parents[1]
    profiles = load_profiles(root / "config" / "experiments.yaml")
    assert "deblur_multichannel" in profiles
    assert profiles["sylvester_planted"]["planted"] is True
    assert profiles["random_small"]["tol"] == 1e-10

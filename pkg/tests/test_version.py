import importlib.util
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_checker():
    path = ROOT / "tools" / "check_version.py"
    spec = importlib.util.spec_from_file_location("check_version", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_versions_agree():
    assert load_checker().check_versions(ROOT) == []


def test_mismatch_is_reported(tmp_path):
    (tmp_path / "src" / "qkrylov").mkdir(parents=True)
    (tmp_path / "pyproject.toml").write_text('[project]\nversion = "1.2.3"\n', encoding="utf-8")
    (tmp_path / "src" / "qkrylov" / "__init__.py").write_text(
        '__version__ = "1.2.4"\n', encoding="utf-8"
    )
    (tmp_path / "CHANGELOG.md").write_text("# Changelog\n\n## v1.2.3\n", encoding="utf-8")
    errors = load_checker().check_versions(tmp_path)
    assert errors == ["pyproject.toml (1.2.3) != __init__.py (1.2.4)"]

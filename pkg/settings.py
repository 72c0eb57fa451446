import json
import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)

DEFAULTS = {
    "tol": 1e-9,
    "fd_step": 1e-5,
    "seed": 20090101,
    "verify_count": 200,
    "lab_count": 10000,
    "sphere_samples": 100000,
    "rotation_attempts": 64,
    "format": "structured",
    "log_level": "WARNING",
}


# -----------------------------
# Persistenz: Einstellungen merken
# -----------------------------
def _settings_file() -> Path:
    override = os.environ.get("HKMOD_SETTINGS")
    if override:
        return Path(override)
    base = Path(__file__).resolve().parent
    return base / "hkmod_settings.json"


def load_settings() -> dict:
    """
    Defaults + Inhalt der JSON-Datei (falls vorhanden).
    Kaputte Dateien werden ignoriert, dann gelten nur die Defaults.
    """
    merged = dict(DEFAULTS)
    p = _settings_file()
    if not p.exists():
        return merged
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except Exception as e:
        logger.warning("settings file %s unreadable (%s), using defaults", p, e)
        return merged
    if not isinstance(data, dict):
        logger.warning("settings file %s is not a JSON object, using defaults", p)
        return merged
    merged.update({k: v for k, v in data.items() if k in DEFAULTS})
    return merged


def save_settings(data: dict) -> None:
    p = _settings_file()
    known = {k: v for k, v in data.items() if k in DEFAULTS}
    p.write_text(json.dumps(known, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")

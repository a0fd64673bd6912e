import os
import subprocess
import sys


def _backend(env_extra):
    env = {k: v for k, v in os.environ.items() if k != "ESPERANTIST_PURE_PYTHON"}
    env.update(env_extra)
    out = subprocess.run([sys.executable, "-c", "import esperantist; print(esperantist.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_forces_python_fallback():
    assert _backend({"ESPERANTIST_PURE_PYTHON": "1"}) == "python"


def test_default_backend_is_a_known_name():
    assert _backend({}) in ("compiled", "python")

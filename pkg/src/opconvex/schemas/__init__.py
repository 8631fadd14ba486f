"""JSON schemas for configs, reports and single outcomes."""
import json
from functools import lru_cache
from importlib import resources

NAMES = ("config", "report", "outcome", "counterexample")


@lru_cache(maxsize=None)
def load_schema(name):
    if name not in NAMES:
        raise KeyError(f"no schema named {name!r}")
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)

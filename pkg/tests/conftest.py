import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from spamsift.dataset import Dataset
from spamsift.features import ATTRIBUTE_NAMES, Label, OrdinalLevel, SiteRecord

settings.register_profile(
    "suite", derandomize=True, max_examples=200,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


def make_record(label=Label.UNLABELED, url="http://example.test/", **levels) -> SiteRecord:
    values = {name: OrdinalLevel.VERY_MIN for name in ATTRIBUTE_NAMES if name != "black_list"}
    values["black_list"] = "no"
    for name, value in levels.items():
        if name == "black_list":
            values[name] = value
        else:
            values[name] = value if isinstance(value, OrdinalLevel) else OrdinalLevel(value)
    return SiteRecord(url=url, label=label, **values)


def make_random_dataset(rng: random.Random, n: int | None = None) -> Dataset:
    """Arbitrary records over the full level/label space."""
    n = rng.randint(0, 40) if n is None else n
    records = []
    for i in range(n):
        levels = {name: rng.choice(list(OrdinalLevel)).value
                  for name in ATTRIBUTE_NAMES if name != "black_list"}
        records.append(make_record(
            label=rng.choice(list(Label)),
            url=f"http://site-{i}.test/{rng.randint(0, 999)}",
            black_list=rng.choice(["yes", "no"]),
            **levels,
        ))
    return Dataset(tuple(records))

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gbspec.sections import hyperbolic, polynomial, trigonometric  # noqa: E402

ALL_FAMILIES = [polynomial(), hyperbolic(2.0), trigonometric(1.0)]


@pytest.fixture(params=ALL_FAMILIES, ids=lambda f: f.tag)
def family(request):
    return request.param

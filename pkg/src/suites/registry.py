"""Command name to suite."""
from src.suites.base import Suite
from src.suites.geometry import FIBER_SUITE, LIPSCHITZ_SUITE, SECTION_SUITE
from src.suites.metric import DISTANCE_SUITE
from src.suites.normal import NORMAL_SUITE, TOPOLOGY_SUITE
from src.suites.verify import VERIFY_SUITE

SUITES: dict[str, Suite] = {
    "verify": VERIFY_SUITE,
    "fiber": FIBER_SUITE,
    "section": SECTION_SUITE,
    "distance": DISTANCE_SUITE,
    "topology-gap": TOPOLOGY_SUITE,
    "normal-orbit": NORMAL_SUITE,
    "lipschitz": LIPSCHITZ_SUITE,
}

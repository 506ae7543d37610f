# utils/family_names.py
import re

_ALIASES = {
    "bgp": "bgp",
    "balanced": "bgp",
    "balancedgrowth": "bgp",
    "balancedgrowthpath": "bgp",
    "steady": "bgp",
    "sol1": "bgp",
    "twointegral": "two-integral",
    "twointegrals": "two-integral",
    "2integral": "two-integral",
    "i1i2": "two-integral",
    "sol2": "two-integral",
    "oneintegral": "one-integral",
    "1integral": "one-integral",
    "singleintegral": "one-integral",
    "i1": "one-integral",
    "sol3": "one-integral",
}


def normalize_family(raw: str) -> str:
    """
    Normalize a user-typed family name to one of bgp / two-integral / one-integral.
    Returns empty string if the name is not recognised.
    """
    if not raw:
        return ""

    s = str(raw).strip().lower()
    # drop separators: "Two_Integral", "two integral", "two-integral" all match
    s = re.sub(r"[\s_\-\.]", "", s)

    return _ALIASES.get(s, "")

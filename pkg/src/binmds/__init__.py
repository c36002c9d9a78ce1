"""Binary MDS array codes with optimal access (C1) and optimal repair (C2)."""

from .basecode import BaseCode, evenodd_base, rs_companion_base, verify_base_mds
from .codec import Codeword, encode, erasure_decode, is_mds
from .construct import (ArrayCode, CoefficientSet, build_c1, build_c2,
                        expected_subpacketization, make_coefficients)
from .repair import (BandwidthReport, RepairPlan, bandwidth_report, execute_repair,
                     plan_repair)

__version__ = "0.1.0"

__all__ = [
    "ArrayCode", "BandwidthReport", "BaseCode", "CoefficientSet", "Codeword",
    "RepairPlan", "bandwidth_report", "build_c1", "build_c2", "encode",
    "erasure_decode", "evenodd_base", "execute_repair", "expected_subpacketization",
    "is_mds", "make_coefficients", "plan_repair", "rs_companion_base",
    "verify_base_mds",
]

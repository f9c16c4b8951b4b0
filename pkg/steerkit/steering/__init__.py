from steerkit.steering.assemblage import Assemblage, assemblage
from steerkit.steering.hierarchy import (
    Certification,
    HierarchyLabel,
    RegionCell,
    Verdict,
    classify,
    region_scan,
    write_region_csv,
)
from steerkit.steering.lhs import (
    LhsModel,
    SteeringCertificate,
    lhs_bound,
    lhs_feasible,
    steering_certificate,
    verify_certificate,
)
from steerkit.steering.mesh import DirectionMesh, fibonacci_mesh, shrinking_factor
from steerkit.steering.radius import Direction, RadiusBracket, critical_radius_bracket

__all__ = [
    "Assemblage", "assemblage",
    "Certification", "HierarchyLabel", "RegionCell", "Verdict", "classify", "region_scan", "write_region_csv",
    "LhsModel", "SteeringCertificate", "lhs_bound", "lhs_feasible", "steering_certificate", "verify_certificate",
    "DirectionMesh", "fibonacci_mesh", "shrinking_factor",
    "Direction", "RadiusBracket", "critical_radius_bracket",
]

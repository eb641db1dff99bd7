import os
import sys

# Add project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))


def test_imports():
    try:
        # Core imports
        from src.core.constants import aubin_talenti, ckn_constants, log_sobolev_constant
        from src.core.config_manager import ConfigManager, RunConfig
        from src.core.numerics.quadrature import integrate_improper
        from src.core.numerics.extrapolation import extrapolate_limit
        from src.core.geometry.manifold import cone, euclidean, from_table
        from src.core.bubbles.functionals import ckn_K, gaussian_L, talenti_H
        from src.core.inequalities.sobolev import sobolev_quotient
        from src.core.inequalities.logsobolev import logsob_pipeline, logsob_quotient
        from src.core.inequalities.gaussian import gaussian_lsi_check
        from src.core.inequalities.isoperimetric import isoperimetric_check
        from src.core.inequalities.noncollapse import noncollapse_bound
        from src.core.transport.solver import solve_radial_transport
        from src.core.transport.checks import determinant_trace_check
        from src.core.transport.pipelines import proof_pipeline_p_eq_1, proof_pipeline_p_gt_1
        from src.core.system.auditor import LabAuditor

        # Scan imports
        from src.scans import ckn_sharpness_scan, logsob_sharpness_scan, sobolev_sharpness_scan
        from src.scans.providers.manager import ScanManager

        # Utils imports
        from src.utils.logger import setup_logger
        from src.utils.report_writer import ReportWriter, emit_plot_data

        print("✅ All imports successful!")
        return True
    except ImportError as e:
        print(f"❌ Import error: {str(e)}")
        return False


if __name__ == "__main__":
    print("Running system tests...")
    imports_ok = test_imports()

    print("\nTest Summary:")
    print(f"Imports: {'✅' if imports_ok else '❌'}")

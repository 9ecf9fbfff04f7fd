"""rovsim: deterministic 4-DOF underwater ROV simulation with a latency-aware
teleoperation link, trial harness and parameter calibration."""

from .dynamics import (BodyForce, BodyVelocity, DivergedState, DragModel,
                       Hydrostatics, MassMatrix, Pose, SingularTransform,
                       VehicleState, acceleration, assemble_mass_matrix,
                       coriolis_matrix, depth_pressure, drag_matrix,
                       heave_acceleration, pose_rate, restoring_force,
                       rotation_matrix, step, transform_matrix)
from .environment import EnvironmentConfig, WaveConfig, disturbance_force
from .simengine import (ScenarioConfig, TickRecord, TrialLog, TrialMetrics,
                        export_log, import_log, run_scenario, trial_metrics)
from .teleop import (CommandFrame, LatencyProfile, LinkEmulator, LiveSession,
                     TelemetryFrame, decode_command, decode_telemetry,
                     encode_command, encode_telemetry)
from .vehicle import (Buttons, CommandRejected, GripperState, SensorReadings,
                      ThrusterLayout, VehicleParams, allocate_thrust,
                      battery_model, gripper_step, read_sensors)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

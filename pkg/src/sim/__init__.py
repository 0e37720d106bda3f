from src.sim.fixture import DEMO_TRANSCRIPT, build_demo_fixture
from src.sim.scene import SceneLayer, render_layered_scene
from src.sim.sim_config import FramePair, SimulationConfig, load_simulation_config
from src.sim.simulation import BEEP_LINE, FramePerception, SimulationResult, run_simulation, stream_reports
from src.sim.timing import TimingReport

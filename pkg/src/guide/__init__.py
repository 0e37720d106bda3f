from src.guide.compose import GuidanceMessage, compose_guidance, instruction_slot, meters_to_feet
from src.guide.session import SpeakInput, ask_destination, load_destination, place_names, plan_route, save_destination

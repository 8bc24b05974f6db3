from shared.utils import silence_warnings_and_logs

silence_warnings_and_logs()

from agency_swarm import Agency  # noqa: E402 - must import after warning suppression
from dotenv import load_dotenv  # noqa: E402 - must import after warning suppression

from supersat_agent import create_supersat_agent  # noqa: E402 - must import after warning suppression

load_dotenv()

model = "gpt-5"
supersat = create_supersat_agent(model=model, reasoning_effort="medium")


def create_agency(load_threads_callback=None):
    agency = Agency(
        supersat,
        name="SupersatAgency",
        load_threads_callback=load_threads_callback,
    )
    return agency


if __name__ == "__main__":
    agency = create_agency()
    agency.terminal_demo()

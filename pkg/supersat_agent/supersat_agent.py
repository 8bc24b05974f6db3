from agency_swarm import Agent, ModelSettings
from openai.types.shared.reasoning import Reasoning

from .tools import (
    AuditFamily,
    BuildContainers,
    BuildFamily,
    CountFreeGraphs,
    EnumerateCopies,
    OracleFreeCount,
    SupersatTrend,
)


def create_supersat_agent(model: str = "gpt-5-mini", reasoning_effort: str = "medium") -> Agent:
    """Factory that returns a fresh SupersatAgent instance.
    Use this in tests to avoid reusing a singleton across multiple agencies.
    """
    return Agent(
        name="SupersatAgent",
        description="Runs balanced supersaturation and graph container experiments on small graphs and hypergraphs.",
        instructions="instructions.md",
        model=model,
        tools=[
            EnumerateCopies,
            BuildFamily,
            AuditFamily,
            BuildContainers,
            CountFreeGraphs,
            OracleFreeCount,
            SupersatTrend,
        ],
        model_settings=ModelSettings(
            reasoning=Reasoning(summary="auto", effort=reasoning_effort), truncation="auto"
        ),
    )


if __name__ == "__main__":
    from dotenv import load_dotenv
    from agency_swarm import Agency

    load_dotenv()

    agent = create_supersat_agent()
    agency = Agency(agent)
    agency.terminal_demo()

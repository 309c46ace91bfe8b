"""chirpy: a mixed-initiative open-domain dialogue engine.

Stateless per-turn orchestration over an external state table: an
annotator pipeline, Bayesian + phonetic entity linking, a three-phase
topic tracker, priority-ranked response selection with sampled prompts,
and a pack of policy-driven response generators, exposed as an HTTP
service, a REPL, and a replay tool.
"""

__version__ = "0.1.0"

"""steptutor: next-step hint tutoring for introductory Python exercises.

Subpackages and modules:
  snapshots  - keystroke log ingestion and step-sequence cleaning
  exercises  - exercise catalog and stdin/stdout solution checking
  prompts    - prompt rendering across the design space
  llm        - chat-completion client with a deterministic offline mock
  events     - append-only session event log
  service    - HTTP API for exercises, hints, ratings and checks
  harness    - batch generation, ranking, rubric and rating reports
"""

__version__ = "0.1.0"

"""Checkpoint registry: which published model backs each task code.

Refs are consumed as-is (no finetuning here); entries that live outside the
hub carry a source note so a reviewer can fetch them manually.
"""

from dataclasses import dataclass

TASK_CODES = ("CR", "NER", "NLI", "PD", "QA", "SA", "SRL", "SS", "Sum", "WSD", "BASE")


@dataclass(frozen=True)
class CheckpointEntry:
    task: str
    checkpoint_ref: str
    dataset_note: str


_ENTRIES = (
    CheckpointEntry("NLI", "sentence-transformers/bert-base-nli-mean-tokens",
                    "Stanford Natural Language Inference (SNLI), MultiNLI"),
    CheckpointEntry("PD", "bert-base-cased-finetuned-mrpc",
                    "Microsoft Research Paraphrase Corpus (MRPC)"),
    CheckpointEntry("SS", "vblagoje/bert-english-uncased-finetuned-chunk", "CoNLL-2003"),
    CheckpointEntry("Sum", "lidiya/bart-base-samsum", "SAMSum"),
    CheckpointEntry("WSD", "github:BPYap/BERT-WSD (bert-base-baseline)", "English all-words"),
    CheckpointEntry("CR", "github:mandarjoshi90/coref (bert_coreference_base)",
                    "OntoNotes and GAP"),
    CheckpointEntry("NER", "dslim/bert-base-NER", "CoNLL-2003"),
    CheckpointEntry("QA", "bert-base-qa", "SQUAD"),
    CheckpointEntry("SA", "barissayil/bert-sentiment-analysis-sst",
                    "Stanford Sentiment Treebank (SST)"),
    CheckpointEntry("SRL", "allennlp:bert-base-srl-2020.02.10", "English PropBank SRL"),
    CheckpointEntry("BASE", "bert-base-cased", "pretrained, no finetuning"),
)


class CheckpointRegistry:
    """One entry per task code; lookup by code."""

    def __init__(self, entries=_ENTRIES):
        self._by_task = {}
        for e in entries:
            if e.task in self._by_task:
                raise ValueError(f"duplicate registry entry for {e.task}")
            self._by_task[e.task] = e
        missing = set(TASK_CODES) - set(self._by_task)
        if missing:
            raise ValueError(f"registry is missing tasks: {sorted(missing)}")

    def entry(self, task: str) -> CheckpointEntry:
        if task not in self._by_task:
            raise KeyError(f"unknown task {task!r}")
        return self._by_task[task]

    def checkpoint_ref(self, task: str) -> str:
        return self.entry(task).checkpoint_ref

    def tasks(self):
        return tuple(self._by_task)


DEFAULT_REGISTRY = CheckpointRegistry()

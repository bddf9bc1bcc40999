"""Guardrail pipeline: turn a HelpRequest into a code-free AssistanceResponse.

The pipeline runs the sufficiency and main completions concurrently, then
enforces the no-code guarantee on the main text: detected fenced blocks are
sent back to a rewrite model, and anything that still survives is replaced
mechanically.  The returned main text never contains a fenced code block,
no matter how the backends behave.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backends import BackendError, CompletionBackend, CompletionParams
from .model import AssistanceResponse, ClassContext, HelpRequest
from .prompts import (
    TEMPLATE_VERSION,
    build_main_prompt,
    build_removal_prompt,
    build_sufficiency_prompt,
)

SUFFICIENT_SENTINEL = "OK."
CODE_REMOVED_PLACEHOLDER = "[code removed]"

# Fence lines may be indented up to three spaces; backtick info strings must
# not themselves contain backticks.
_FENCE_OPEN = re.compile(r"^ {0,3}(`{3,}|~{3,})(.*)$")
_TRAILING_JUNK = " \t\r\n\"'"


class MainCompletionFailed(Exception):
    """The main response completion failed; no response can be produced."""

    def __init__(self, cause: BackendError):
        super().__init__(str(cause))
        self.cause = cause


@dataclass(frozen=True)
class SufficiencyOutcome:
    """Result of the sufficiency check.

    ``clarification_text`` is present exactly when the check decided more
    information is needed.
    """

    sufficient: bool
    clarification_text: str | None = None

    def __post_init__(self):
        if not self.sufficient and not self.clarification_text:
            raise ValueError("needs_clarification requires clarification text")
        if self.sufficient and self.clarification_text is not None:
            raise ValueError("sufficient outcome carries no clarification")


@dataclass(frozen=True)
class CodeBlockSpan:
    """Offsets of one fenced code block, fence lines included."""

    start: int
    end: int
    fence: str  # "```" or "~~~"


def parse_sufficiency(completion: str) -> SufficiencyOutcome:
    """Classify a sufficiency completion by its terminal sentinel.

    Sufficient iff the completion, after trimming trailing whitespace and
    quotes, ends with "OK." (case-sensitive).  A sentinel anywhere else does
    not count.  Anything else is a clarification request, returned verbatim.
    A blank completion carries no question to show, so it yields the
    no-clarification outcome.
    """
    trimmed = completion.rstrip(_TRAILING_JUNK)
    if trimmed.endswith(SUFFICIENT_SENTINEL) or not completion.strip():
        return SufficiencyOutcome(sufficient=True)
    return SufficiencyOutcome(sufficient=False, clarification_text=completion)


def detect_code_blocks(markdown: str) -> list[CodeBlockSpan]:
    """Find all fenced code blocks (``` or ~~~ fences, language tag or not).

    Inline single-backtick code is not a block.  An unterminated fence runs
    to the end of the text.  Returned spans are ordered and non-overlapping.
    """
    spans: list[CodeBlockSpan] = []
    offset = 0
    open_span_start: int | None = None
    open_fence = ""
    open_len = 0
    for line in markdown.splitlines(keepends=True):
        stripped = line.rstrip("\r\n")
        match = _FENCE_OPEN.match(stripped)
        if open_span_start is None:
            if match:
                fence, info = match.group(1), match.group(2)
                if not (fence[0] == "`" and "`" in info):
                    open_span_start = offset
                    open_fence = fence[0] * 3
                    open_len = len(fence)
        else:
            if (
                match
                and match.group(1)[0] == open_fence[0]
                and len(match.group(1)) >= open_len
                and match.group(2).strip() == ""
            ):
                spans.append(
                    CodeBlockSpan(open_span_start, offset + len(line), open_fence)
                )
                open_span_start = None
        offset += len(line)
    if open_span_start is not None:
        spans.append(CodeBlockSpan(open_span_start, len(markdown), open_fence))
    return spans


def strip_code_blocks(text: str, placeholder: str = CODE_REMOVED_PLACEHOLDER) -> str:
    """Mechanically replace every fenced block with a placeholder line.

    Iterates until no block remains, so the result is always clean even for
    pathological inputs.
    """
    while True:
        spans = detect_code_blocks(text)
        if not spans:
            return text
        pieces = []
        cursor = 0
        for span in spans:
            pieces.append(text[cursor : span.start])
            pieces.append(placeholder)
            if span.end > span.start and text[span.end - 1] == "\n":
                pieces.append("\n")
            cursor = span.end
        pieces.append(text[cursor:])
        text = "".join(pieces)


def enforce_no_code(
    main: str,
    rewrite_backend: CompletionBackend,
    rewrite_params: CompletionParams,
    prompt_id: str | None = None,
) -> tuple[str, bool, bool, tuple[str, str] | None]:
    """Guarantee the returned text has zero fenced code blocks.

    Clean input passes through untouched.  Otherwise the text goes to the
    rewrite backend; blocks surviving the rewrite (or a rewrite failure) are
    stripped mechanically.  Returns (text, code_was_removed,
    fallback_strip_applied, removal trace entry or None).  Never fails.
    """
    if not detect_code_blocks(main):
        return main, False, False, None
    prompt = build_removal_prompt(main)
    try:
        rewritten = rewrite_backend.complete(prompt, rewrite_params, prompt_id)
    except BackendError as exc:
        stripped = strip_code_blocks(main)
        return stripped, True, True, (prompt, f"[rewrite failed: {exc}]")
    if detect_code_blocks(rewritten):
        return strip_code_blocks(rewritten), True, True, (prompt, rewritten)
    return rewritten, True, False, (prompt, rewritten)


@dataclass(frozen=True)
class Responder:
    """Binds the chat and rewrite backends for the full request flow.

    Chat-role completion parameters come from the ClassContext so instructor
    configuration applies per query; the rewrite role has its own model and
    parameters.
    """

    chat_backend: CompletionBackend
    rewrite_backend: CompletionBackend
    rewrite_params: CompletionParams

    def respond(self, req: HelpRequest, ctx: ClassContext) -> AssistanceResponse:
        """Produce a code-free response for a validated request.

        The sufficiency and main completions are issued concurrently.  A
        failed main completion is surfaced as MainCompletionFailed; a failed
        sufficiency completion only drops the clarification and leaves an
        audit note in the trace.
        """
        chat_params = CompletionParams(
            model=ctx.model, temperature=ctx.temperature, max_tokens=ctx.max_tokens
        )
        sufficiency_prompt = build_sufficiency_prompt(req, ctx)
        main_prompt = build_main_prompt(req, ctx)
        with ThreadPoolExecutor(max_workers=2) as pool:
            sufficiency_future = pool.submit(
                self.chat_backend.complete,
                sufficiency_prompt,
                chat_params,
                f"{req.id}:sufficiency",
            )
            main_future = pool.submit(
                self.chat_backend.complete, main_prompt, chat_params, f"{req.id}:main"
            )
            try:
                main_completion = main_future.result()
            except BackendError as exc:
                sufficiency_future.cancel()
                raise MainCompletionFailed(exc) from exc
            try:
                sufficiency_completion = sufficiency_future.result()
                outcome = parse_sufficiency(sufficiency_completion)
                sufficiency_entry = (sufficiency_prompt, sufficiency_completion)
            except BackendError as exc:
                outcome = SufficiencyOutcome(sufficient=True)
                sufficiency_entry = (
                    sufficiency_prompt,
                    f"[sufficiency check failed: {exc}]",
                )

        main_text, code_was_removed, fallback_applied, removal_entry = enforce_no_code(
            main_completion,
            self.rewrite_backend,
            self.rewrite_params,
            f"{req.id}:removal",
        )
        trace = [sufficiency_entry, (main_prompt, main_completion)]
        if removal_entry is not None:
            trace.append(removal_entry)
        return AssistanceResponse(
            request_id=req.id,
            main_text=main_text,
            clarification_text=outcome.clarification_text,
            code_was_removed=code_was_removed,
            fallback_strip_applied=fallback_applied,
            trace=tuple(trace),
            template_version=TEMPLATE_VERSION,
        )

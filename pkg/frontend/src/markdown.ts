/**
 * Minimal, safe Markdown rendering for assistant responses.
 *
 * Everything is HTML-escaped first; raw HTML in a response is displayed as
 * text, never executed. Supported syntax: paragraphs, `inline code`,
 * **bold**, *italic*, and - bullet lists. Responses are guaranteed
 * fenced-block-free by the server, so block code needs no handling.
 */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function inlineSpans(escaped: string): string {
  return escaped
    .replace(/`([^`\n]+)`/g, "<code>$1</code>")
    .replace(/\*\*([^*\n]+)\*\*/g, "<strong>$1</strong>")
    .replace(/\*([^*\n]+)\*/g, "<em>$1</em>");
}

export function renderMarkdown(text: string): string {
  const blocks = text.split(/\n{2,}/);
  const html: string[] = [];
  for (const block of blocks) {
    if (!block.trim()) continue;
    const lines = block.split("\n");
    const isList = lines.every((l) => /^\s*[-*]\s+/.test(l) || !l.trim());
    if (isList) {
      const items = lines
        .filter((l) => l.trim())
        .map((l) => `<li>${inlineSpans(escapeHtml(l.replace(/^\s*[-*]\s+/, "")))}</li>`);
      html.push(`<ul>${items.join("")}</ul>`);
    } else {
      html.push(`<p>${inlineSpans(escapeHtml(block))}</p>`);
    }
  }
  return html.join("\n");
}

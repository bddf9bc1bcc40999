/**
 * Renders one assistance response: the main Markdown text, with any
 * clarification request in a visually distinct panel above it. Both are
 * always shown together when both exist.
 */

import { QueryResponse } from "./api.js";
import { renderMarkdown } from "./markdown.js";

export function renderResponse(
  container: HTMLElement,
  response: QueryResponse,
): void {
  container.replaceChildren();
  if (response.clarification_text) {
    const panel = document.createElement("aside");
    panel.className = "clarification";
    const heading = document.createElement("h3");
    heading.textContent = "More information requested";
    const body = document.createElement("div");
    body.innerHTML = renderMarkdown(response.clarification_text);
    panel.append(heading, body);
    container.append(panel);
  }
  const main = document.createElement("article");
  main.className = "response";
  main.innerHTML = renderMarkdown(response.main_text);
  container.append(main);
}

/**
 * The student help-request form: four separate inputs with guidance text
 * that nudges students toward complete, well-structured requests.
 */

import { ApiError, QueryFields, QueryResponse, submitQuery } from "./api.js";

export interface HelpFormHandlers {
  onResponse: (response: QueryResponse) => void;
}

const FIELD_GUIDANCE: Array<{
  name: keyof QueryFields;
  label: string;
  guidance: string;
  kind: "input" | "textarea";
}> = [
  {
    name: "language",
    label: "Language",
    guidance: "Which programming language are you working in?",
    kind: "input",
  },
  {
    name: "code",
    label: "Code",
    guidance:
      "Paste the smallest snippet of your code that shows the problem.",
    kind: "textarea",
  },
  {
    name: "error",
    label: "Error",
    guidance:
      "If you see an error message, copy it here exactly as it appears.",
    kind: "textarea",
  },
  {
    name: "issue",
    label: "Issue / Question",
    guidance:
      "Describe what you expected, what happens instead, or what you want to understand.",
    kind: "textarea",
  },
];

export function renderHelpForm(
  container: HTMLElement,
  handlers: HelpFormHandlers,
): HTMLFormElement {
  const form = document.createElement("form");
  form.className = "help-form";
  for (const field of FIELD_GUIDANCE) {
    const wrapper = document.createElement("div");
    wrapper.className = "field";
    const label = document.createElement("label");
    label.textContent = field.label;
    label.htmlFor = `field-${field.name}`;
    const guidance = document.createElement("p");
    guidance.className = "guidance";
    guidance.textContent = field.guidance;
    const control =
      field.kind === "input"
        ? document.createElement("input")
        : document.createElement("textarea");
    control.id = `field-${field.name}`;
    control.setAttribute("name", field.name);
    wrapper.append(label, guidance, control);
    form.append(wrapper);
  }
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Request help";
  const errorBox = document.createElement("p");
  errorBox.className = "form-error";
  errorBox.hidden = true;
  form.append(submit, errorBox);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (submit.disabled) return; // one in-flight submission at a time
    const fields: QueryFields = {
      language: valueOf(form, "language"),
      code: valueOf(form, "code"),
      error: valueOf(form, "error"),
      issue: valueOf(form, "issue"),
    };
    submit.disabled = true;
    errorBox.hidden = true;
    try {
      const response = await submitQuery(fields);
      handlers.onResponse(response);
    } catch (err) {
      errorBox.hidden = false;
      errorBox.textContent =
        err instanceof ApiError
          ? `${err.message} (${err.code})`
          : "Request failed; please try again.";
    } finally {
      submit.disabled = false;
    }
  });

  container.append(form);
  return form;
}

function valueOf(form: HTMLFormElement, name: string): string {
  const el = form.querySelector<HTMLInputElement | HTMLTextAreaElement>(
    `[name="${name}"]`,
  );
  // verbatim pass-through: no trimming or normalization before submission
  return el ? el.value : "";
}

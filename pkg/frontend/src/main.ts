/**
 * App entry point: token sign-in, then the student help form or the
 * instructor dashboard depending on which tab is chosen.
 */

import { clearToken, fetchReport, getToken, setToken } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import { renderHelpForm } from "./helpForm.js";
import { renderResponse } from "./responseView.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text) node.textContent = text;
  if (className) node.className = className;
  return node;
}

function renderSignIn(root: HTMLElement) {
  root.replaceChildren();
  const box = el("div", undefined, "sign-in");
  box.append(el("h2", "Sign in"));
  box.append(
    el("p", "Paste the access token your instructor gave you.", "guidance"),
  );
  const input = el("input");
  input.type = "password";
  input.placeholder = "access token";
  const button = el("button", "Continue");
  button.addEventListener("click", () => {
    if (!input.value) return;
    setToken(input.value);
    renderApp(root);
  });
  box.append(input, button);
  root.append(box);
}

function renderStudentView(main: HTMLElement) {
  main.replaceChildren();
  const formPane = el("section", undefined, "form-pane");
  const responsePane = el("section", undefined, "response-pane");
  main.append(formPane, responsePane);
  renderHelpForm(formPane, {
    onResponse: (response) => renderResponse(responsePane, response),
  });
}

async function renderInstructorView(main: HTMLElement) {
  main.replaceChildren(el("p", "Loading report…"));
  const draw = async () => {
    try {
      const report = await fetchReport();
      await renderDashboard(main, report, { onLabelStored: draw });
    } catch (err) {
      main.replaceChildren(
        el(
          "p",
          err instanceof Error ? err.message : "Could not load the report.",
          "form-error",
        ),
      );
    }
  };
  await draw();
}

export function renderApp(root: HTMLElement) {
  if (!getToken()) {
    renderSignIn(root);
    return;
  }
  root.replaceChildren();
  const nav = el("nav");
  const studentTab = el("button", "Ask for help");
  const instructorTab = el("button", "Class dashboard");
  const signOut = el("button", "Sign out", "sign-out");
  nav.append(studentTab, instructorTab, signOut);
  const main = el("main");
  root.append(nav, main);
  studentTab.addEventListener("click", () => renderStudentView(main));
  instructorTab.addEventListener("click", () => void renderInstructorView(main));
  signOut.addEventListener("click", () => {
    clearToken();
    renderSignIn(root);
  });
  renderStudentView(main);
}

const root = document.getElementById("app");
if (root) renderApp(root);

// Pure view layer: every displayed fact is copied from a service payload.
// The only client-side processing is presentational bracket nesting for
// the collapsible tree panels.

import { MovesPayload, MoveSummary, StateSummary } from './types';

const OPEN: Record<string, string> = { '(': ')', '[': ']' };

interface BracketNode {
  text: string;
  children: BracketNode[];
}

/** Split a bracketed display string into one nesting level of children.
 *  Purely lexical; the strings stay byte-identical when re-joined. */
export function bracketTree(text: string): BracketNode {
  const node: BracketNode = { text, children: [] };
  const t = text.trim();
  const last = t[t.length - 1];
  if (!(t[0] in OPEN) || OPEN[t[0]] !== last) return node;
  const inner = t.slice(1, -1);
  let depth = 0;
  let start = 0;
  const parts: string[] = [];
  for (let i = 0; i < inner.length; i++) {
    const ch = inner[i];
    if (ch in OPEN) depth++;
    else if (ch === ')' || ch === ']') depth--;
    else if (ch === ',' && depth === 0) {
      parts.push(inner.slice(start, i));
      start = i + 1;
    }
  }
  parts.push(inner.slice(start));
  if (parts.length > 1) {
    node.children = parts.map(p => bracketTree(p.trim()));
  }
  return node;
}

function treePanel(doc: Document, label: string, text: string): HTMLElement {
  const wrap = doc.createElement('div');
  wrap.className = `panel panel-${label}`;
  const render = (n: BracketNode): HTMLElement => {
    if (!n.children.length) {
      const li = doc.createElement('span');
      li.className = 'leaf';
      li.textContent = n.text;
      return li;
    }
    const det = doc.createElement('details');
    det.open = true;
    const sum = doc.createElement('summary');
    sum.textContent = n.text;
    det.appendChild(sum);
    const ul = doc.createElement('ul');
    for (const c of n.children) {
      const li = doc.createElement('li');
      li.appendChild(render(c));
      ul.appendChild(li);
    }
    det.appendChild(ul);
    return det;
  };
  const title = doc.createElement('h3');
  title.textContent = label;
  wrap.appendChild(title);
  const value = doc.createElement('code');
  value.className = `value ${label}`;
  value.textContent = text;
  wrap.appendChild(value);
  wrap.appendChild(render(bracketTree(text)));
  return wrap;
}

const IDENT_RE = /#\d+(\(\+\)#\d+)?/;

/** Render a state summary: seed, memory and term panels plus badges.
 *  When the current move list is supplied, memory events whose identifier
 *  has a backward move become clickable and preview the undo's target
 *  (pure cross-referencing of two payloads, no computation). */
export function renderState(doc: Document, state: StateSummary,
                            moves?: MovesPayload): HTMLElement {
  const root = doc.createElement('section');
  root.className = 'state';
  root.dataset.fingerprint = state.fingerprint;
  const display = doc.createElement('code');
  display.className = 'display';
  display.textContent = state.display;
  root.appendChild(display);
  root.appendChild(treePanel(doc, 'seed', state.seed));
  const memoryPanel = treePanel(doc, 'memory', state.memory);
  if (moves) {
    annotateUndoPreviews(doc, memoryPanel, moves);
  }
  root.appendChild(memoryPanel);
  root.appendChild(treePanel(doc, 'process', state.process));
  const badge = doc.createElement('span');
  badge.className = 'badge';
  badge.textContent = state.initial ? 'initial' : 'in progress';
  root.appendChild(badge);
  return root;
}

function annotateUndoPreviews(doc: Document, panel: HTMLElement,
                              moves: MovesPayload): void {
  const undoByIdent = new Map<string, MoveSummary>();
  for (const m of moves.moves) {
    if (m.direction === 'bwd') undoByIdent.set(m.ident, m);
  }
  for (const el of Array.from(panel.querySelectorAll('.leaf'))) {
    const ident = el.textContent?.match(IDENT_RE)?.[0];
    const undo = ident !== undefined ? undoByIdent.get(ident) : undefined;
    if (!undo) continue;
    const node = el as HTMLElement;
    node.classList.add('undoable');
    node.dataset.undoIndex = String(undo.index);
    node.addEventListener('click', () => {
      let preview = node.querySelector('code.undo-preview');
      if (!preview) {
        preview = doc.createElement('code');
        preview.className = 'undo-preview';
        preview.textContent = `undo ${undo.ident} ${undo.label} -> ${undo.target.display}`;
        node.appendChild(preview);
      }
    });
  }
}

function moveText(m: MoveSummary): string {
  return `${m.direction} ${m.ident} ${m.label}`;
}

/** Render the move list with pairwise concurrency highlighting.  Each
 *  entry's data attributes carry the indices it is concurrent with, and a
 *  preview of the state the move leads to. */
export function renderMoves(doc: Document, payload: MovesPayload,
                            onApply?: (m: MoveSummary) => void): HTMLElement {
  const root = doc.createElement('section');
  root.className = 'moves';
  root.dataset.fingerprint = payload.fingerprint;
  if (!payload.moves.length) {
    const badge = doc.createElement('span');
    badge.className = 'badge stuck';
    badge.textContent = 'stuck or initial: no enabled moves';
    root.appendChild(badge);
    return root;
  }
  const list = doc.createElement('ol');
  for (const m of payload.moves) {
    const li = doc.createElement('li');
    li.className = `move ${m.direction}`;
    const concurrent = payload.concurrency[m.index]
      .map((v, j) => (v === true ? j : -1))
      .filter(j => j >= 0);
    li.dataset.index = String(m.index);
    li.dataset.concurrentWith = concurrent.join(',');
    const button = doc.createElement('button');
    button.textContent = moveText(m);
    if (onApply) button.addEventListener('click', () => onApply(m));
    li.appendChild(button);
    const preview = doc.createElement('code');
    preview.className = 'preview';
    preview.textContent = m.target.display;
    li.appendChild(preview);
    list.appendChild(li);
  }
  root.appendChild(list);
  return root;
}

/** Timeline of applied moves, oldest first. */
export function renderTimeline(doc: Document, entries: string[]): HTMLElement {
  const root = doc.createElement('ol');
  root.className = 'timeline';
  for (const e of entries) {
    const li = doc.createElement('li');
    li.textContent = e;
    root.appendChild(li);
  }
  return root;
}

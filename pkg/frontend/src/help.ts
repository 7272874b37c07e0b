/** In-app keyboard reference, itself fully readable by screen reader. */

export interface ShortcutDoc {
  keys: string;
  action: string;
}

export const KEYBOARD_MAP: ShortcutDoc[] = [
  { keys: 'q', action: 'Open or close the question panel' },
  { keys: 'd', action: 'Play the current description' },
  { keys: 's', action: 'Stop speech' },
  { keys: '[', action: 'Slower speech' },
  { keys: ']', action: 'Faster speech' },
  { keys: 'h', action: 'Show or hide this help' },
  { keys: 'Escape', action: 'Close the open panel' },
];

export function buildHelpScreen(container: HTMLElement): HTMLElement {
  const section = document.createElement('section');
  section.setAttribute('aria-label', 'Keyboard shortcuts');
  section.hidden = true;

  const heading = document.createElement('h2');
  heading.textContent = 'Keyboard shortcuts';
  section.appendChild(heading);

  const note = document.createElement('p');
  note.textContent = 'Shortcuts are single keys and stay out of the way while you type in a field.';
  section.appendChild(note);

  const list = document.createElement('dl');
  for (const shortcut of KEYBOARD_MAP) {
    const dt = document.createElement('dt');
    dt.textContent = shortcut.keys;
    const dd = document.createElement('dd');
    dd.textContent = shortcut.action;
    list.appendChild(dt);
    list.appendChild(dd);
  }
  section.appendChild(list);

  container.appendChild(section);
  return section;
}

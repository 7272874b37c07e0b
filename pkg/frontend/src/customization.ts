/** The six description settings as a labeled, keyboard-operable form. */

import { DEFAULT_SETTINGS, type CustomizationSettings } from './api.js';

export const FREE_FORM_MAX_CHARS = 500;

const FREQUENCY_CHOICES = [8, 15, 30];
const EMPHASIS_CHOICES = ['general', 'character', 'environment', 'instructional'] as const;
const SUBJECTIVITY_CHOICES = ['objective', 'subjective'] as const;
const COLORS_CHOICES = ['include', 'exclude'] as const;

export interface CustomizationPanel {
  element: HTMLFieldSetElement;
  readDraft(): CustomizationSettings;
  /** null when the draft is valid, else the blocking message. */
  validate(): string | null;
  showError(message: string): void;
  clearError(): void;
}

export interface CustomizationPanelOptions {
  initial?: CustomizationSettings;
  /** Fires with a valid draft when the action button is pressed. */
  onApply: (settings: CustomizationSettings) => void;
  applyLabel?: string;
}

let idCounter = 0;

function labeled(
  parent: HTMLElement,
  labelText: string,
  control: HTMLSelectElement | HTMLInputElement | HTMLTextAreaElement
): void {
  const id = `cust-${labelText.toLowerCase().replace(/[^a-z]+/g, '-')}-${idCounter++}`;
  const row = document.createElement('div');
  row.className = 'field';
  const label = document.createElement('label');
  label.htmlFor = id;
  label.textContent = labelText;
  control.id = id;
  row.appendChild(label);
  row.appendChild(control);
  parent.appendChild(row);
}

function select(choices: readonly (string | number)[], value: string | number): HTMLSelectElement {
  const el = document.createElement('select');
  for (const choice of choices) {
    const option = document.createElement('option');
    option.value = String(choice);
    option.textContent = String(choice);
    el.appendChild(option);
  }
  el.value = String(value);
  return el;
}

export function buildCustomizationPanel(
  container: HTMLElement,
  options: CustomizationPanelOptions
): CustomizationPanel {
  const initial = options.initial ?? DEFAULT_SETTINGS;

  const fieldset = document.createElement('fieldset');
  const legend = document.createElement('legend');
  legend.textContent = 'Description settings';
  fieldset.appendChild(legend);

  const frequency = select(FREQUENCY_CHOICES, initial.frequency_s);
  labeled(fieldset, 'Seconds between descriptions', frequency);

  const length = document.createElement('input');
  length.type = 'number';
  length.min = '15';
  length.max = '100';
  length.value = String(initial.target_length_words);
  labeled(fieldset, 'Words per description', length);

  const emphasis = select(EMPHASIS_CHOICES, initial.emphasis);
  labeled(fieldset, 'Emphasis', emphasis);

  const subjectivity = select(SUBJECTIVITY_CHOICES, initial.subjectivity);
  labeled(fieldset, 'Style', subjectivity);

  const colors = select(COLORS_CHOICES, initial.colors);
  labeled(fieldset, 'Color mentions', colors);

  const freeForm = document.createElement('textarea');
  freeForm.rows = 3;
  freeForm.value = initial.free_form_guidelines;
  labeled(fieldset, 'Additional guidelines', freeForm);

  const errorRegion = document.createElement('p');
  errorRegion.className = 'form-error';
  errorRegion.setAttribute('role', 'alert');
  errorRegion.hidden = true;
  fieldset.appendChild(errorRegion);

  const apply = document.createElement('button');
  apply.type = 'button';
  apply.textContent = options.applyLabel ?? 'Apply settings';
  fieldset.appendChild(apply);

  const panel: CustomizationPanel = {
    element: fieldset,
    readDraft() {
      return {
        frequency_s: Number(frequency.value),
        target_length_words: Number(length.value),
        emphasis: emphasis.value as CustomizationSettings['emphasis'],
        subjectivity: subjectivity.value as CustomizationSettings['subjectivity'],
        colors: colors.value as CustomizationSettings['colors'],
        free_form_guidelines: freeForm.value,
      };
    },
    validate() {
      const draft = panel.readDraft();
      if (draft.free_form_guidelines.length > FREE_FORM_MAX_CHARS) {
        return `Additional guidelines are limited to ${FREE_FORM_MAX_CHARS} characters`;
      }
      if (
        !Number.isInteger(draft.target_length_words) ||
        draft.target_length_words < 15 ||
        draft.target_length_words > 100
      ) {
        return 'Words per description must be a whole number from 15 to 100';
      }
      return null;
    },
    showError(message: string) {
      errorRegion.textContent = message;
      errorRegion.hidden = false;
    },
    clearError() {
      errorRegion.textContent = '';
      errorRegion.hidden = true;
    },
  };

  apply.addEventListener('click', () => {
    const problem = panel.validate();
    if (problem !== null) {
      panel.showError(problem);
      return;
    }
    panel.clearError();
    options.onApply(panel.readDraft());
  });

  container.appendChild(fieldset);
  return panel;
}

/** Small static accessibility audit run by tests over each screen.
 *
 * Catches the critical failures a screen-reader or keyboard user cannot
 * work around: controls with no accessible name, focusable content hidden
 * from assistive tech, and positive tabindex values that scramble or trap
 * the tab order.
 */

export interface Violation {
  rule: 'missing-name' | 'hidden-focusable' | 'positive-tabindex';
  severity: 'critical';
  element: string;
}

const INTERACTIVE_SELECTOR = [
  'a[href]',
  'button',
  'input:not([type="hidden"])',
  'select',
  'textarea',
  '[role="button"]',
  '[role="link"]',
  '[role="checkbox"]',
  '[role="radio"]',
  '[role="switch"]',
  '[role="slider"]',
  '[role="textbox"]',
].join(', ');

function describe(el: Element): string {
  const id = el.id ? `#${el.id}` : '';
  const type = el.getAttribute('type');
  return `${el.tagName.toLowerCase()}${id}${type ? `[type=${type}]` : ''}`;
}

function labelFor(el: Element): string {
  if (!el.id) return '';
  const label = el.ownerDocument?.querySelector(`label[for="${el.id}"]`);
  return label?.textContent?.trim() ?? '';
}

export function accessibleName(el: Element): string {
  const ariaLabel = el.getAttribute('aria-label')?.trim();
  if (ariaLabel) return ariaLabel;

  const labelledBy = el.getAttribute('aria-labelledby');
  if (labelledBy) {
    const text = labelledBy
      .split(/\s+/)
      .map((id) => el.ownerDocument?.getElementById(id)?.textContent?.trim() ?? '')
      .join(' ')
      .trim();
    if (text) return text;
  }

  const tag = el.tagName.toLowerCase();
  if (tag === 'input' || tag === 'select' || tag === 'textarea') {
    const fromLabel = labelFor(el) || el.closest('label')?.textContent?.trim() || '';
    if (fromLabel) return fromLabel;
    const value = (el as HTMLInputElement).type;
    if (tag === 'input' && (value === 'button' || value === 'submit')) {
      return (el as HTMLInputElement).value.trim();
    }
    return el.getAttribute('title')?.trim() ?? '';
  }

  // buttons and links name themselves by their content
  const text = el.textContent?.trim();
  if (text) return text;
  const img = el.querySelector('img[alt]');
  if (img) return img.getAttribute('alt')?.trim() ?? '';
  return el.getAttribute('title')?.trim() ?? '';
}

export function audit(root: Element): Violation[] {
  const violations: Violation[] = [];

  for (const el of Array.from(root.querySelectorAll(INTERACTIVE_SELECTOR))) {
    if (el.closest('[hidden]')) continue; // not rendered, not reachable
    if (accessibleName(el) === '') {
      violations.push({ rule: 'missing-name', severity: 'critical', element: describe(el) });
    }
    if (el.closest('[aria-hidden="true"]')) {
      violations.push({ rule: 'hidden-focusable', severity: 'critical', element: describe(el) });
    }
  }

  for (const el of Array.from(root.querySelectorAll('[tabindex]'))) {
    const tabindex = Number(el.getAttribute('tabindex'));
    if (tabindex > 0) {
      violations.push({ rule: 'positive-tabindex', severity: 'critical', element: describe(el) });
    }
  }

  return violations;
}
